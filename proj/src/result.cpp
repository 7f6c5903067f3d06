#include "ctxlab/result.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "ctxlab/errors.hpp"

namespace ctxlab {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::optional<std::int64_t> parse_int(const std::string& s) {
    std::int64_t v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return v;
}

std::optional<double> parse_real(const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

Bindings parse_result(const ContextItem& item, const ResultSchema& schema) {
    // Collect `name: value` pairs line by line; later lines win.
    std::map<std::string, std::string> raw;
    std::istringstream lines(item.text());
    std::string line;
    while (std::getline(lines, line)) {
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = trim(std::string_view(line).substr(0, colon));
        std::string value = trim(std::string_view(line).substr(colon + 1));
        if (!key.empty()) raw[key] = value;
    }

    Bindings out;
    for (const auto& field : schema.fields) {
        auto it = raw.find(field.name);
        if (it == raw.end())
            throw ParseError("missing variable: " + field.name, field.name);
        const std::string& text = it->second;
        switch (field.type) {
            case ValueType::Integer: {
                auto v = parse_int(text);
                if (!v)
                    throw ParseError("variable '" + field.name +
                                         "' is not an integer: \"" + text + "\"",
                                     field.name);
                if (field.allowed &&
                    std::find(field.allowed->begin(), field.allowed->end(),
                              *v) == field.allowed->end())
                    throw ParseError("variable '" + field.name +
                                         "' outside admissible set: \"" + text +
                                         "\"",
                                     field.name);
                out[field.name] = *v;
                break;
            }
            case ValueType::Real: {
                auto v = parse_real(text);
                if (!v)
                    throw ParseError("variable '" + field.name +
                                         "' is not a number: \"" + text + "\"",
                                     field.name);
                out[field.name] = *v;
                break;
            }
            case ValueType::Text:
                out[field.name] = text;
                break;
        }
    }
    return out;
}

std::string value_to_string(const Value& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value))
        return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&value)) {
        // Shortest representation that round-trips exactly.
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *d);
        if (ec != std::errc()) return "0";
        return std::string(buf, ptr);
    }
    return std::get<std::string>(value);
}

ContextItem serialize_bindings(const Bindings& bindings, Role role) {
    std::string text;
    for (const auto& [name, value] : bindings) {
        if (!text.empty()) text += '\n';
        text += name + ": " + value_to_string(value);
    }
    return ContextItem(std::move(text), role);
}

}  // namespace ctxlab
