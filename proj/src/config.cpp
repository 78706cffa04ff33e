#include "lsobolev/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>

#include "lsobolev/errors.hpp"

namespace lsobolev {

namespace {

using TolField = std::variant<double Tolerances::*, int Tolerances::*>;

const std::vector<std::pair<std::string, TolField>>& tolerance_fields() {
    static const std::vector<std::pair<std::string, TolField>> fields{
        {"orthonormality", &Tolerances::orthonormality},
        {"orthonormality_n", &Tolerances::orthonormality_n},
        {"oracle_low", &Tolerances::oracle_low},
        {"oracle_low_n", &Tolerances::oracle_low_n},
        {"oracle_high", &Tolerances::oracle_high},
        {"oracle_high_n", &Tolerances::oracle_high_n},
        {"norm_ratio", &Tolerances::norm_ratio},
        {"representation", &Tolerances::representation},
        {"representation_n", &Tolerances::representation_n},
        {"nonzero_factor", &Tolerances::nonzero_factor},
        {"mh_ratio_low", &Tolerances::mh_ratio_low},
        {"mh_ratio_high", &Tolerances::mh_ratio_high},
        {"slope", &Tolerances::slope},
        {"log_correlation", &Tolerances::log_correlation},
        {"fourier_vanish", &Tolerances::fourier_vanish},
        {"g_hat_limit", &Tolerances::g_hat_limit},
        {"deriv_vanish", &Tolerances::deriv_vanish},
        {"classical", &Tolerances::classical},
        {"sign_change_epsilon", &Tolerances::sign_change_epsilon},
    };
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(trim(item));
    if (out.size() == 1 && out[0].empty())
        out.clear();
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DomainError("not a number: '" + s + "'");
    }
    if (used != s.size())
        throw DomainError("not a number: '" + s + "'");
    return v;
}

int to_int(const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        throw DomainError("not an integer: '" + s + "'");
    }
    if (used != s.size())
        throw DomainError("not an integer: '" + s + "'");
    return v;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i)
            out += ",";
        if constexpr (std::is_same_v<T, double>)
            out += format_double(xs[i]);
        else
            out += std::to_string(xs[i]);
    }
    return out;
}

} // namespace

std::string format_double(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_commas(text))
        out.push_back(to_double(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_commas(text))
        out.push_back(to_int(item));
    return out;
}

std::vector<double> parse_p_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_commas(text)) {
        const std::string l = lower(item);
        out.push_back(l == "inf" || l == "infinity" ? kInfinity : to_double(item));
    }
    return out;
}

ExperimentConfig ExperimentConfig::resolved() const {
    ExperimentConfig out = *this;
    if (out.n_grid.empty())
        for (int i = 1; i <= 8; ++i)
            out.n_grid.push_back(std::max(1, static_cast<int>(std::lround(n_max * i / 8.0))));
    if (out.mh_degrees.empty())
        for (int d : {8, 4, 2, 1})
            out.mh_degrees.push_back(std::max(1, static_cast<int>(std::lround(static_cast<double>(n_max) / d))));
    return out;
}

void ExperimentConfig::validate() const {
    if (!(alpha > -1.0) || !std::isfinite(alpha))
        throw DomainError("alpha must satisfy alpha > -1, got " + format_double(alpha));
    for (double m : masses)
        if (!(m >= 0.0) || !std::isfinite(m))
            throw DomainError("masses must be finite and nonnegative");
    if (n_max < 0)
        throw DomainError("n_max must be nonnegative");
    if (n_grid.size() < 4)
        throw DomainError("n_grid needs at least four degrees");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1 || n_grid[i] > n_max)
            throw DomainError("n_grid entries must lie in [1, n_max]");
        if (i && n_grid[i] <= n_grid[i - 1])
            throw DomainError("n_grid must be strictly increasing");
    }
    if (n_grid.front() < static_cast<int>(masses.size()))
        throw DomainError("n_grid must start at or above N+1");
    for (double p : p_list)
        check_admissible(alpha, p, mode);
    if (!(mh_x_max > 0.0) || mh_points < 2)
        throw DomainError("mh grid needs x_max > 0 and at least two points");
    for (int n : mh_degrees)
        if (n < 1 || n > n_max)
            throw DomainError("mh degrees must lie in [1, n_max]");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::describe() const {
    std::vector<std::pair<std::string, std::string>> out{
        {"alpha", format_double(alpha)},
        {"masses", join(masses)},
        {"n_max", std::to_string(n_max)},
        {"n_grid", join(n_grid)},
        {"p", join(p_list)},
        {"mode", to_string(mode)},
        {"mh.x_max", format_double(mh_x_max)},
        {"mh.points", std::to_string(mh_points)},
        {"mh.degrees", join(mh_degrees)},
    };
    for (const auto& [name, field] : tolerance_fields()) {
        std::string v = std::visit(
            [&](auto ptr) {
                if constexpr (std::is_same_v<decltype(ptr), int Tolerances::*>)
                    return std::to_string(tol.*ptr);
                else
                    return format_double(tol.*ptr);
            },
            field);
        out.emplace_back("tolerances." + name, v);
    }
    return out;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto fail = [&](const std::string& what) {
            throw DomainError("config line " + std::to_string(line_no) + ": " + what);
        };
        if (line.front() == '[') {
            if (line.back() != ']')
                fail("unterminated section header");
            section = lower(trim(line.substr(1, line.size() - 2)));
            if (section != "experiment" && section != "mh" && section != "tolerances")
                fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail("expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            fail("key outside any section");
        try {
            if (section == "experiment") {
                if (key == "alpha")
                    base.alpha = to_double(value);
                else if (key == "masses")
                    base.masses = parse_double_list(value);
                else if (key == "n_max" || key == "nmax")
                    base.n_max = to_int(value);
                else if (key == "n_grid" || key == "ngrid")
                    base.n_grid = parse_int_list(value);
                else if (key == "p")
                    base.p_list = parse_p_list(value);
                else if (key == "mode")
                    base.mode = beta_mode_from_string(value);
                else
                    fail("unknown key '" + key + "' in [experiment]");
            } else if (section == "mh") {
                if (key == "x_max")
                    base.mh_x_max = to_double(value);
                else if (key == "points")
                    base.mh_points = to_int(value);
                else if (key == "degrees")
                    base.mh_degrees = parse_int_list(value);
                else
                    fail("unknown key '" + key + "' in [mh]");
            } else {
                const auto& fields = tolerance_fields();
                const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return f.first == key; });
                if (it == fields.end())
                    fail("unknown tolerance '" + key + "'");
                std::visit(
                    [&](auto ptr) {
                        if constexpr (std::is_same_v<decltype(ptr), int Tolerances::*>)
                            base.tol.*ptr = to_int(value);
                        else
                            base.tol.*ptr = to_double(value);
                    },
                    it->second);
            }
        } catch (const DomainError& e) {
            const std::string msg = e.what();
            if (msg.rfind("config line", 0) == 0)
                throw;
            fail(msg);
        }
    }
    return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in)
        throw DomainError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

} // namespace lsobolev
