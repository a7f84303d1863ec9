#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace corpus_router {

/// RFC-4180 field quoting: fields containing commas, quotes or newlines are
/// wrapped in double quotes with embedded quotes doubled.
std::string csv_escape(const std::string& field);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Fixed formatting for numeric report cells so identical runs emit
/// byte-identical files.
std::string csv_num(double value, int precision = 6);

}  // namespace corpus_router
