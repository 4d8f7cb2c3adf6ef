#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace srl {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

std::uint64_t fnv1a_hash(const std::string& text);
std::string hash_hex(std::uint64_t h);

// Write via a temporary file and rename, so readers never observe a
// partial file.  Throws std::runtime_error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& content);

// Comma-separated table with '#'-prefixed provenance comments and a fixed
// header row.
class CsvBuilder {
  public:
    void comment(const std::string& line);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<std::string>& cells);
    const std::string& str() const { return text_; }

  private:
    std::string text_;
    std::size_t columns_ = 0;
};

}  // namespace srl
