#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "operator.hpp"

namespace levi3 {

/// An operator plus the verdicts its file declares under [expect].
struct OperatorSpec {
    Operator op;
    std::map<std::string, std::string> expect;
};

namespace detail {

inline std::string trim(std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] inline void config_fail(int line, const std::string& msg) {
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

}  // namespace detail

/// Format (version 1):
///
///   [operator]
///   version = 1
///   name = <identifier>
///   order = 2 | 3
///   dimension = <n>
///   T = <horizon>
///   [coefficients]
///   a[j, (a1, ..., an)] = "<expression>"
///   [expect]
///   <key> = <value>
///
/// Blank lines and lines starting with '#' are ignored; omitted coefficients are zero.
inline OperatorSpec parse_operator_text(const std::string& text) {
    using detail::config_fail;
    using detail::trim;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    std::map<std::string, std::string> header;
    struct Coef {
        int line, j;
        MultiIndex alpha;
        std::string expr;
        std::size_t expr_col;
    };
    std::vector<Coef> coefs;
    OperatorSpec spec;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[' && s.back() == ']' && s.find('=') == std::string::npos) {
            section = trim(s.substr(1, s.size() - 2));
            if (section != "operator" && section != "coefficients" && section != "expect")
                config_fail(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) config_fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section == "operator") {
            if (header.count(key)) config_fail(line, "duplicate key '" + key + "'");
            header[key] = val;
        } else if (section == "expect") {
            spec.expect[key] = val;
        } else if (section == "coefficients") {
            // a[j, (a1, ..., an)]
            if (key.size() < 4 || key[0] != 'a' || key[1] != '[' || key.back() != ']')
                config_fail(line, "coefficient key must look like a[j, (a1, ..., an)]");
            const std::string inner = key.substr(2, key.size() - 3);
            const auto comma = inner.find(',');
            const auto lp = inner.find('('), rp = inner.find(')');
            if (comma == std::string::npos || lp == std::string::npos || rp == std::string::npos || lp > rp ||
                comma > lp)
                config_fail(line, "coefficient key must look like a[j, (a1, ..., an)]");
            Coef c{line, 0, {}, {}, 0};
            try {
                c.j = std::stoi(trim(inner.substr(0, comma)));
                std::stringstream ms(inner.substr(lp + 1, rp - lp - 1));
                std::string part;
                while (std::getline(ms, part, ',')) c.alpha.push_back(std::stoi(trim(part)));
            } catch (const std::exception&) {
                config_fail(line, "malformed coefficient indices");
            }
            if (val.size() < 2 || val.front() != '"' || val.back() != '"')
                config_fail(line, "coefficient value must be a double-quoted expression");
            c.expr = val.substr(1, val.size() - 2);
            c.expr_col = raw.find('"') + 2;
            coefs.push_back(std::move(c));
        } else {
            config_fail(line, "key outside of a section");
        }
    }
    auto need = [&](const std::string& k) {
        auto it = header.find(k);
        if (it == header.end()) throw ConfigError("missing header key '" + k + "' in [operator]");
        return it->second;
    };
    if (header.count("version") && header["version"] != "1")
        throw ConfigError("unsupported operator file version " + header["version"]);
    for (auto& [k, v] : header)
        if (k != "version" && k != "name" && k != "order" && k != "dimension" && k != "T")
            throw ConfigError("unknown header key '" + k + "'");
    try {
        spec.op = Operator(need("name"), std::stoi(need("order")), std::stoi(need("dimension")), std::stod(need("T")));
    } catch (const std::invalid_argument&) {
        throw ConfigError("malformed numeric header value");
    }
    for (auto& c : coefs) {
        try {
            spec.op.set(c.j, c.alpha, TimeFn::parse(c.expr));
        } catch (const ParseError& e) {
            throw ConfigError("line " + std::to_string(c.line) + ", column " +
                              std::to_string(c.expr_col + e.offset()) + ": " + e.what());
        } catch (const ConfigError& e) {
            detail::config_fail(c.line, e.what());
        }
    }
    return spec;
}

inline OperatorSpec load_operator_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open operator file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_operator_text(ss.str());
}

inline std::string format_operator(const OperatorSpec& spec) {
    const Operator& op = spec.op;
    std::ostringstream o;
    o << "[operator]\nversion = 1\nname = " << op.name << "\norder = " << op.order
      << "\ndimension = " << op.dimension << "\nT = " << detail::format_number(op.horizon) << "\n\n[coefficients]\n";
    for (auto& [k, f] : op.coeffs) {
        o << "a[" << k.j << ", (";
        for (std::size_t i = 0; i < k.alpha.size(); ++i) o << (i ? ", " : "") << k.alpha[i];
        o << ")] = \"" << f.print() << "\"\n";
    }
    if (!spec.expect.empty()) {
        o << "\n[expect]\n";
        for (auto& [k, v] : spec.expect) o << k << " = " << v << "\n";
    }
    return o.str();
}

}  // namespace levi3
