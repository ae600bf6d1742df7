#pragma once
// Minimal RFC-4180 reader/writer. An unquoted empty field is reported as
// null; a quoted empty field ("") is an empty string.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rddl::csv {

class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

using Field = std::optional<std::string>;
using Record = std::vector<Field>;

std::vector<Record> parse(std::string_view text);

std::string format_record(std::span<const Field> fields);
std::string format_record(std::span<const std::string> fields);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace rddl::csv
