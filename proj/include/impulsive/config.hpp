#pragma once

// Reader for the scenario file format, a TOML subset:
//
//   # comment
//   [section]
//   key = 1.5e-3          numbers
//   key = "text"          strings
//   key = true            booleans
//   key = [1, 2, 3]       arrays of numbers or of strings
//   [[array_section]]     repeated tables
//
// Every value remembers its line so schema errors point at the source.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace impulsive::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, int line, const std::string& msg);
    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

using Value = std::variant<bool, double, std::string, std::vector<double>, std::vector<std::string>>;

struct Entry {
    Value value;
    int line = 0;
};

class Table {
public:
    Table() = default;
    Table(std::string source, std::string name, int line)
        : source_(std::move(source)), name_(std::move(name)), line_(line) {}

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] bool has(std::string_view key) const;
    void set(const std::string& key, Entry e);

    /// Throws for the first key not in `allowed`.
    void restrict_keys(const std::vector<std::string_view>& allowed) const;

    [[nodiscard]] double number(std::string_view key, double fallback) const;
    [[nodiscard]] double number(std::string_view key) const;
    [[nodiscard]] std::optional<double> maybe_number(std::string_view key) const;
    /// Numbers that must be integral and within [lo, hi].
    [[nodiscard]] long long integer(std::string_view key, long long fallback, long long lo,
                                    long long hi) const;
    [[nodiscard]] bool boolean(std::string_view key, bool fallback) const;
    [[nodiscard]] std::string string(std::string_view key, std::string fallback) const;
    [[nodiscard]] std::string string(std::string_view key) const;
    /// A scalar number is accepted as a one-element array.
    [[nodiscard]] std::vector<double> numbers(std::string_view key) const;
    [[nodiscard]] std::vector<double> numbers(std::string_view key,
                                              std::vector<double> fallback) const;

    /// Error located at `key` (or at the table header when the key is absent).
    [[noreturn]] void fail(std::string_view key, const std::string& msg) const;

private:
    [[nodiscard]] const Entry* find(std::string_view key) const;

    std::string source_;
    std::string name_;
    int line_ = 0;
    std::map<std::string, Entry, std::less<>> entries_;
};

class Document {
public:
    explicit Document(std::string source) : source_(std::move(source)) {}

    [[nodiscard]] const std::string& source() const noexcept { return source_; }
    /// The named table, or an empty one (line 0) when the section is absent.
    [[nodiscard]] Table table(std::string_view name) const;
    [[nodiscard]] bool has_table(std::string_view name) const;
    [[nodiscard]] const std::vector<Table>& array(std::string_view name) const;
    /// Throws for the first section not in `allowed`.
    void restrict_sections(const std::vector<std::string_view>& allowed) const;

    Table& add_table(const std::string& name, int line);
    Table& add_array_item(const std::string& name, int line);

private:
    std::string source_;
    std::map<std::string, Table, std::less<>> tables_;
    std::map<std::string, std::vector<Table>, std::less<>> arrays_;
};

Document parse(std::string_view text, std::string source = "<string>");
Document parse_file(const std::filesystem::path& path);

}  // namespace impulsive::config
