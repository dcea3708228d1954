#ifndef AUTOBOOST_CSV_HPP
#define AUTOBOOST_CSV_HPP

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace autoboost::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, embedded separators and
/// line breaks, CRLF or LF record endings. A trailing empty line is ignored.
std::vector<Row> read(std::istream& in, char sep = ',');

/// Quotes a field when it contains the separator, a quote or a line break.
std::string escape(std::string_view field, char sep = ',');

void write_row(std::ostream& out, const Row& row, char sep = ',');

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Strict full-string parse (surrounding blanks allowed); nullopt otherwise.
std::optional<double> parse_double(std::string_view text);

}  // namespace autoboost::csv

#endif  // AUTOBOOST_CSV_HPP
