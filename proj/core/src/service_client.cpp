#include "corpus_router/service_client.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

namespace corpus_router {

namespace {

std::vector<std::string> split_args(const std::string& command) {
    std::vector<std::string> args;
    std::istringstream in(command);
    std::string token;
    while (in >> token) args.push_back(token);
    return args;
}

/// Long-lived child process speaking newline-delimited JSON on its
/// stdin/stdout.
class ExecClient final : public ServiceClient {
public:
    explicit ExecClient(const std::string& command) {
        const auto args = split_args(command);
        if (args.empty()) throw std::invalid_argument("exec endpoint: empty command");

        int to_child[2];
        int from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw std::runtime_error("exec endpoint: pipe() failed");

        pid_ = fork();
        if (pid_ < 0) throw std::runtime_error("exec endpoint: fork() failed");
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            std::vector<char*> argv;
            for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
            argv.push_back(nullptr);
            execvp(argv[0], argv.data());
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
        signal(SIGPIPE, SIG_IGN);
    }

    ~ExecClient() override {
        if (write_fd_ >= 0) close(write_fd_);
        if (read_fd_ >= 0) close(read_fd_);
        if (pid_ > 0) {
            int status = 0;
            waitpid(pid_, &status, 0);
        }
    }

    std::string request_line(const std::string& json_line) override {
        std::string msg = json_line;
        msg += '\n';
        size_t written = 0;
        while (written < msg.size()) {
            const ssize_t n = write(write_fd_, msg.data() + written, msg.size() - written);
            if (n <= 0)
                throw std::runtime_error("exec endpoint: service unavailable (write: " +
                                         std::string(std::strerror(errno)) + ")");
            written += static_cast<size_t>(n);
        }
        std::string reply;
        char c;
        for (;;) {
            const ssize_t n = read(read_fd_, &c, 1);
            if (n <= 0)
                throw std::runtime_error("exec endpoint: service unavailable (closed stream)");
            if (c == '\n') break;
            reply += c;
        }
        return reply;
    }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
};

/// One HTTP POST per request; the reply body is the JSON object.
class HttpClient final : public ServiceClient {
public:
    explicit HttpClient(const std::string& url) {
        // split http://host[:port][/path]
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw std::invalid_argument("http endpoint: malformed url: " + url);
        const auto rest = url.substr(scheme_end + 3);
        const auto slash = rest.find('/');
        const std::string host_port = rest.substr(0, slash);
        path_ = slash == std::string::npos ? "/" : rest.substr(slash);
        base_ = url.substr(0, scheme_end + 3) + host_port;
        client_ = std::make_unique<httplib::Client>(base_);
        client_->set_connection_timeout(10);
        client_->set_read_timeout(120);
    }

    std::string request_line(const std::string& json_line) override {
        auto res = client_->Post(path_, json_line, "application/json");
        if (!res)
            throw std::runtime_error("http endpoint: service unavailable (" + base_ + ")");
        if (res->status != 200)
            throw std::runtime_error("http endpoint: status " + std::to_string(res->status));
        return res->body;
    }

private:
    std::string base_;
    std::string path_;
    std::unique_ptr<httplib::Client> client_;
};

}  // namespace

std::unique_ptr<ServiceClient> open_service(const std::string& endpoint) {
    if (endpoint.rfind("exec:", 0) == 0)
        return std::make_unique<ExecClient>(endpoint.substr(5));
    if (endpoint.rfind("http:", 0) == 0 || endpoint.rfind("https:", 0) == 0)
        return std::make_unique<HttpClient>(endpoint);
    throw std::invalid_argument("unknown endpoint scheme (want exec:<cmd> or http:<url>): " +
                                endpoint);
}

std::vector<float> embed_remote(ServiceClient& client, const std::string& text, int dim) {
    const nlohmann::json request{{"op", "embed"}, {"text", text}, {"dim", dim}};
    const auto reply = nlohmann::json::parse(client.request_line(request.dump()));
    auto vec = reply.at("vec").get<std::vector<float>>();
    if (static_cast<int>(vec.size()) != dim)
        throw std::runtime_error("embed service returned wrong dimension");
    return vec;
}

std::string generate_remote(ServiceClient& client, const std::string& query,
                            const nlohmann::json& contexts) {
    const nlohmann::json request{{"op", "generate"}, {"query", query}, {"contexts", contexts}};
    std::string body;
    try {
        body = client.request_line(request.dump());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("generator unavailable: ") + e.what());
    }
    const auto reply = nlohmann::json::parse(body);
    return reply.at("answer").get<std::string>();
}

}  // namespace corpus_router
