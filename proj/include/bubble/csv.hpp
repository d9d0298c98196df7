#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace bubble::csv {

/// One logical record and the physical line it starts on (1-based).
struct Record {
  std::size_t line_no = 0;
  std::vector<std::string> fields;
  bool malformed = false;  // unterminated quote
};

/// Comma-separated reader with RFC 4180 quoting. Lines starting with '#'
/// outside a quoted field are comments and are skipped. Blank lines are skipped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  bool next(Record& rec);

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::string escape(const std::string& field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest round-tripping decimal representation.
std::string format_double(double v);

}  // namespace bubble::csv
