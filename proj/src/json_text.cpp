#include "scamo/json_text.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace scamo {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::domain_error("cannot serialize non-finite number");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void newline(std::string& s, int indent, int depth) {
    if (indent < 0) return;
    s += '\n';
    s.append(static_cast<std::size_t>(indent * depth), ' ');
}

void emit(std::string& s, const ordered_json& v, int indent, int depth) {
    switch (v.type()) {
        case ordered_json::value_t::object: {
            if (v.empty()) {
                s += "{}";
                return;
            }
            s += '{';
            bool first = true;
            for (const auto& [key, item] : v.items()) {
                if (!first) s += ',';
                first = false;
                newline(s, indent, depth + 1);
                s += ordered_json(key).dump();
                s += indent < 0 ? ":" : ": ";
                emit(s, item, indent, depth + 1);
            }
            newline(s, indent, depth);
            s += '}';
            return;
        }
        case ordered_json::value_t::array: {
            if (v.empty()) {
                s += "[]";
                return;
            }
            s += '[';
            bool first = true;
            for (const auto& item : v) {
                if (!first) s += ',';
                first = false;
                newline(s, indent, depth + 1);
                emit(s, item, indent, depth + 1);
            }
            newline(s, indent, depth);
            s += ']';
            return;
        }
        case ordered_json::value_t::number_float:
            s += format_double(v.get<double>());
            return;
        default:
            s += v.dump();
            return;
    }
}

}  // namespace

std::string format_json(const ordered_json& value, int indent) {
    std::string s;
    emit(s, value, indent, 0);
    return s;
}

}  // namespace scamo
