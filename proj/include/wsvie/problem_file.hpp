#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "expression.hpp"
#include "problem.hpp"
#include "walsh.hpp"

namespace wsvie {

/*
 * Plain-text problem definition, one `key = expression` per line:
 *
 *   # Example 2
 *   label = ex2
 *   x0    = 0.1
 *   k1    = -(1/30)^2          # in s, t
 *   k2    = 1/30               # in s, t
 *   beta  = x*(1-x^2)          # in x
 *   sigma = 1-x^2              # in x
 *   exact = tanh(B/30 + atanh(0.1))   # in t, B (optional)
 *
 * '#' starts a comment. x0, k1, k2, beta and sigma are mandatory.
 */

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string text;
    std::size_t line;
    std::size_t column;  // zero-based offset of text in its line
};

inline Kernel kernel_from(const expr::Expression& e) {
    if (auto c = e.constant()) return Kernel::constant_value(*c);
    return Kernel::from_function([e](double s, double t) { return e({s, t, 0.0, 0.0}); });
}

}  // namespace detail

inline ProblemSpec parse_problem(std::string_view source, std::string default_label = "custom") {
    using expr::Var;
    using expr::bit;

    std::map<std::string, detail::Entry, std::less<>> entries;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= source.size()) {
        const auto eol = source.find('\n', pos);
        const std::string_view raw =
            source.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? source.size() + 1 : eol + 1;
        ++line_no;

        const std::string_view content = raw.substr(0, raw.find('#'));
        if (detail::trim(content).empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string_view::npos)
            throw expr::ParseError("expected 'key = expression'", line_no,
                                   content.find_first_not_of(" \t") + 1);
        const std::string key(detail::trim(content.substr(0, eq)));
        static constexpr std::string_view known[] = {"label", "x0",    "k1",   "k2",
                                                     "beta",  "sigma", "exact"};
        bool ok = false;
        for (auto k : known) ok = ok || k == key;
        if (!ok)
            throw expr::ParseError("unknown key '" + key + "'", line_no,
                                   content.find_first_not_of(" \t") + 1);
        if (entries.count(key))
            throw expr::ParseError("duplicate key '" + key + "'", line_no,
                                   content.find_first_not_of(" \t") + 1);
        entries[key] = detail::Entry{std::string(content.substr(eq + 1)), line_no, eq + 1};
    }

    const auto get = [&](const char* key, unsigned vars) {
        const auto it = entries.find(key);
        if (it == entries.end())
            throw std::invalid_argument(std::string("problem file: missing mandatory key '") + key +
                                        "'");
        return expr::parse(it->second.text, vars, it->second.line, it->second.column);
    };

    ProblemSpec p;
    const auto x0 = get("x0", 0u);
    const auto x0_value = x0.constant();
    p.x0 = *x0_value;
    p.k1 = detail::kernel_from(get("k1", bit(Var::s) | bit(Var::t)));
    p.k2 = detail::kernel_from(get("k2", bit(Var::s) | bit(Var::t)));
    const auto beta = get("beta", bit(Var::x));
    p.beta = [beta](double x) { return beta({0.0, 0.0, x, 0.0}); };
    const auto sigma = get("sigma", bit(Var::x));
    p.sigma = [sigma](double x) { return sigma({0.0, 0.0, x, 0.0}); };
    if (entries.count("exact")) {
        const auto exact = get("exact", bit(Var::t) | bit(Var::B));
        p.exact = [exact](double t, double b) { return exact({0.0, t, 0.0, b}); };
    }
    if (const auto it = entries.find("label"); it != entries.end())
        p.label = std::string(detail::trim(it->second.text));
    else
        p.label = std::move(default_label);
    return p;
}

inline ProblemSpec parse_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open problem file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_problem(buf.str(), path.stem().string());
    } catch (const expr::ParseError& e) {
        throw expr::ParseError(path.string() + ": " + e.what(), e.line(), e.column());
    }
}

/// Problem-file text for a built-in example. Numeric literals carry 17
/// significant digits, so the parsed problem evaluates bit-identically.
inline std::string encode_builtin(int id, double a = default_noise_intensity) {
    const ProblemSpec p = builtin_example(id, a);
    const auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        std::string s(buf);
        return v < 0 ? "(" + s + ")" : s;
    };
    std::ostringstream out;
    out << "# built-in example " << id << "\n";
    out << "label = " << p.label << "\n";
    out << "x0 = " << num(p.x0) << "\n";
    out << "k1 = " << num(*p.k1.constant) << "\n";
    out << "k2 = " << num(*p.k2.constant) << "\n";
    if (id == 1) {
        out << "beta = tanh(x)*sech(x)^2\n";
        out << "sigma = sech(x)\n";
        out << "exact = asinh(" << num(a) << "*B + sinh(" << num(p.x0) << "))\n";
    } else {
        out << "beta = x*(1-x^2)\n";
        out << "sigma = 1-x^2\n";
        out << "exact = tanh(" << num(a) << "*B + atanh(" << num(p.x0) << "))\n";
    }
    return out.str();
}

}  // namespace wsvie
