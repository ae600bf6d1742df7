#include "rddl/csv.hpp"

#include <fstream>
#include <sstream>

namespace rddl::csv {

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> out;
    Record record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t i = 0;

    auto end_field = [&] {
        if (!quoted && field.empty()) record.emplace_back(std::nullopt);
        else record.emplace_back(std::move(field));
        field.clear();
        quoted = false;
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        out.push_back(std::move(record));
        record.clear();
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
            ++i;
            while (true) {
                if (i >= text.size()) throw CsvError(line, "unterminated quoted field");
                char q = text[i++];
                if (q == '"') {
                    if (i < text.size() && text[i] == '"') {
                        field.push_back('"');
                        ++i;
                        continue;
                    }
                    break;
                }
                if (q == '\n') ++line;
                field.push_back(q);
            }
            if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                throw CsvError(line, "unexpected character after closing quote");
            }
            continue;
        }
        if (c == ',') {
            end_field();
            ++i;
            continue;
        }
        if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            ++i;
            continue;
        }
        if (c == '\n') {
            end_record();
            ++line;
            ++i;
            continue;
        }
        if (quoted) throw CsvError(line, "unexpected character after closing quote");
        field_started = true;
        field.push_back(c);
        ++i;
    }
    if (field_started || !record.empty()) end_record();
    return out;
}

namespace {

void append_field(std::string& out, const Field& f) {
    if (!f) return;
    const std::string& s = *f;
    bool needs_quotes = s.empty() || s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs_quotes) {
        out += s;
        return;
    }
    out.push_back('"');
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

}  // namespace

std::string format_record(std::span<const Field> fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        append_field(out, fields[i]);
    }
    out.push_back('\n');
    return out;
}

std::string format_record(std::span<const std::string> fields) {
    std::vector<Field> f(fields.begin(), fields.end());
    return format_record(std::span<const Field>(f));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace rddl::csv
