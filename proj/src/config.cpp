#include "impulsive/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace impulsive::config {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool bare_key(std::string_view k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
}

// Drops a trailing comment, ignoring '#' inside strings.
std::string_view strip_comment(std::string_view line) {
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (line[i] == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

class ValueParser {
public:
    ValueParser(std::string_view text, const std::string& source, int line)
        : s_(text), source_(source), line_(line) {}

    Value parse() {
        skip_ws();
        Value v = parse_one(true);
        skip_ws();
        if (pos_ != s_.size()) error("unexpected trailing characters '" + std::string(s_.substr(pos_)) + "'");
        return v;
    }

private:
    [[noreturn]] void error(const std::string& msg) const { throw ConfigError(source_, line_, msg); }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    Value parse_one(bool allow_array) {
        if (pos_ >= s_.size()) error("missing value");
        const char c = s_[pos_];
        if (c == '"') return parse_string();
        if (c == '[') {
            if (!allow_array) error("nested arrays are not supported");
            return parse_array();
        }
        if (s_.substr(pos_, 4) == "true") {
            pos_ += 4;
            return true;
        }
        if (s_.substr(pos_, 5) == "false") {
            pos_ += 5;
            return false;
        }
        return parse_number();
    }

    std::string parse_string() {
        ++pos_;
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                const char e = s_[++pos_];
                out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            } else {
                out += s_[pos_];
            }
            ++pos_;
        }
        if (pos_ >= s_.size()) error("unterminated string");
        ++pos_;
        return out;
    }

    double parse_number() {
        std::size_t end = pos_;
        while (end < s_.size() && s_[end] != ',' && s_[end] != ']' && s_[end] != ' ' &&
               s_[end] != '\t')
            ++end;
        std::string tok(s_.substr(pos_, end - pos_));
        tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
        if (tok == "inf" || tok == "+inf") {
            pos_ = end;
            return INFINITY;
        }
        const char* first = tok.data();
        if (!tok.empty() && tok.front() == '+') ++first;
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty())
            error("invalid value '" + std::string(s_.substr(pos_, end - pos_)) + "'");
        pos_ = end;
        return v;
    }

    Value parse_array() {
        ++pos_;
        std::vector<double> nums;
        std::vector<std::string> strs;
        skip_ws();
        while (pos_ < s_.size() && s_[pos_] != ']') {
            Value item = parse_one(false);
            if (auto* d = std::get_if<double>(&item)) {
                if (!strs.empty()) error("array mixes numbers and strings");
                nums.push_back(*d);
            } else if (auto* str = std::get_if<std::string>(&item)) {
                if (!nums.empty()) error("array mixes numbers and strings");
                strs.push_back(*str);
            } else {
                error("arrays hold numbers or strings only");
            }
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                skip_ws();
            } else if (pos_ < s_.size() && s_[pos_] != ']') {
                error("expected ',' or ']' in array");
            }
        }
        if (pos_ >= s_.size()) error("unterminated array");
        ++pos_;
        if (!strs.empty()) return strs;
        return nums;
    }

    std::string_view s_;
    const std::string& source_;
    int line_;
    std::size_t pos_ = 0;
};

std::string type_name(const Value& v) {
    switch (v.index()) {
    case 0: return "boolean";
    case 1: return "number";
    case 2: return "string";
    case 3: return "number array";
    default: return "string array";
    }
}

}  // namespace

ConfigError::ConfigError(std::string source, int line, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

bool Table::has(std::string_view key) const { return find(key) != nullptr; }

void Table::set(const std::string& key, Entry e) {
    if (entries_.count(key))
        throw ConfigError(source_, e.line, "duplicate key '" + key + "' in [" + name_ + "]");
    entries_.emplace(key, std::move(e));
}

const Entry* Table::find(std::string_view key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

void Table::fail(std::string_view key, const std::string& msg) const {
    const Entry* e = find(key);
    throw ConfigError(source_, e ? e->line : line_,
                      "[" + name_ + "] " + std::string(key) + ": " + msg);
}

void Table::restrict_keys(const std::vector<std::string_view>& allowed) const {
    for (const auto& [k, e] : entries_) {
        bool ok = false;
        for (auto a : allowed) ok = ok || a == k;
        if (!ok) throw ConfigError(source_, e.line, "unknown key '" + k + "' in [" + name_ + "]");
    }
}

std::optional<double> Table::maybe_number(std::string_view key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    if (auto* d = std::get_if<double>(&e->value)) return *d;
    fail(key, "expected number, got " + type_name(e->value));
}

double Table::number(std::string_view key, double fallback) const {
    return maybe_number(key).value_or(fallback);
}

double Table::number(std::string_view key) const {
    auto v = maybe_number(key);
    if (!v) fail(key, "required key missing");
    return *v;
}

long long Table::integer(std::string_view key, long long fallback, long long lo, long long hi) const {
    auto v = maybe_number(key);
    if (!v) return fallback;
    if (std::floor(*v) != *v) fail(key, "expected an integer");
    if (*v < static_cast<double>(lo) || *v > static_cast<double>(hi))
        fail(key, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<long long>(*v);
}

bool Table::boolean(std::string_view key, bool fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (auto* b = std::get_if<bool>(&e->value)) return *b;
    fail(key, "expected boolean, got " + type_name(e->value));
}

std::string Table::string(std::string_view key, std::string fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (auto* s = std::get_if<std::string>(&e->value)) return *s;
    fail(key, "expected string, got " + type_name(e->value));
}

std::string Table::string(std::string_view key) const {
    if (!find(key)) fail(key, "required key missing");
    return string(key, "");
}

std::vector<double> Table::numbers(std::string_view key) const {
    const Entry* e = find(key);
    if (!e) fail(key, "required key missing");
    return numbers(key, {});
}

std::vector<double> Table::numbers(std::string_view key, std::vector<double> fallback) const {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (auto* v = std::get_if<std::vector<double>>(&e->value)) return *v;
    if (auto* d = std::get_if<double>(&e->value)) return {*d};
    fail(key, "expected number array, got " + type_name(e->value));
}

Table Document::table(std::string_view name) const {
    auto it = tables_.find(name);
    return it == tables_.end() ? Table(source_, std::string(name), 0) : it->second;
}

bool Document::has_table(std::string_view name) const { return tables_.find(name) != tables_.end(); }

const std::vector<Table>& Document::array(std::string_view name) const {
    static const std::vector<Table> empty;
    auto it = arrays_.find(name);
    return it == arrays_.end() ? empty : it->second;
}

void Document::restrict_sections(const std::vector<std::string_view>& allowed) const {
    auto check = [&](const std::string& name, int line) {
        for (auto a : allowed)
            if (a == name) return;
        throw ConfigError(source_, line, "unknown section [" + name + "]");
    };
    for (const auto& [n, t] : tables_) check(n, t.line());
    for (const auto& [n, items] : arrays_) check(n, items.front().line());
}

Table& Document::add_table(const std::string& name, int line) {
    if (tables_.count(name) || arrays_.count(name))
        throw ConfigError(source_, line, "section [" + name + "] defined twice");
    return tables_.emplace(name, Table(source_, name, line)).first->second;
}

Table& Document::add_array_item(const std::string& name, int line) {
    if (tables_.count(name))
        throw ConfigError(source_, line, "[[" + name + "]] conflicts with [" + name + "]");
    auto& items = arrays_[name];
    items.emplace_back(source_, name + "#" + std::to_string(items.size() + 1), line);
    return items.back();
}

Document parse(std::string_view text, std::string source) {
    Document doc(source);
    Table* current = nullptr;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = trim(strip_comment(text.substr(pos, nl - pos)));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;

        if (line.starts_with("[[")) {
            if (!line.ends_with("]]")) throw ConfigError(source, line_no, "malformed [[section]] header");
            auto name = trim(line.substr(2, line.size() - 4));
            if (!bare_key(name)) throw ConfigError(source, line_no, "invalid section name");
            current = &doc.add_array_item(std::string(name), line_no);
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(source, line_no, "malformed [section] header");
            auto name = trim(line.substr(1, line.size() - 2));
            if (!bare_key(name)) throw ConfigError(source, line_no, "invalid section name");
            current = &doc.add_table(std::string(name), line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(source, line_no, "expected key = value");
        auto key = trim(line.substr(0, eq));
        if (!bare_key(key)) throw ConfigError(source, line_no, "invalid key '" + std::string(key) + "'");
        if (!current) throw ConfigError(source, line_no, "key outside any section");
        ValueParser vp(trim(line.substr(eq + 1)), source, line_no);
        current->set(std::string(key), Entry{vp.parse(), line_no});
    }
    return doc;
}

Document parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

}  // namespace impulsive::config
