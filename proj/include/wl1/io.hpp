/**
 * @file io.hpp
 * @brief Text formats shared by the command-line tool.
 *
 * Dense text format
 * -----------------
 *   # optional comment lines
 *   rows,cols
 *   v11,v12,...,v1c
 *   ...
 *
 * Entries are comma-separated (spaces allowed). A vector is stored as n,1
 * (one value per line) or 1,n. Lines starting with '#' are ignored anywhere.
 *
 * Experiment config (JSON)
 * ------------------------
 *   { "d": 100, "blocks": [10, 90], "alpha": [0.5, "5/90"],
 *     "strategies": ["unit", "optimal"],          // or "strategy": "optimal"
 *     "m_values": [1, 2, 3] | {"from": 1, "to": 35, "step": 1},
 *     "trials_per_m": 200, "seed": 7, "success_threshold": 0.001,
 *     "threads": 4 }
 */
#pragma once

#include <cctype>
#include <charconv>
#include <iomanip>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include "json.hpp"

#include "wl1/experiments.hpp"
#include "wl1/model.hpp"
#include "wl1/strategy.hpp"

namespace wl1::io {

class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

namespace detail {
inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline double parse_plain(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw ParseError("cannot parse number '" + std::string(s) + "'");
    if (!std::isfinite(v)) throw ParseError("non-finite number '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = s.find(sep);
        out.push_back(s.substr(0, pos));
        if (pos == std::string_view::npos) break;
        s.remove_prefix(pos + 1);
    }
    return out;
}
}  // namespace detail

/// Decimal or fraction ("7/90").
inline double parse_real(std::string_view s) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return detail::parse_plain(s);
    const double num = detail::parse_plain(s.substr(0, slash));
    const double den = detail::parse_plain(s.substr(slash + 1));
    if (den == 0.0) throw ParseError("zero denominator in '" + std::string(s) + "'");
    return num / den;
}

inline std::vector<double> parse_real_list(std::string_view s) {
    std::vector<double> out;
    for (auto tok : detail::split(s, ',')) out.push_back(parse_real(tok));
    return out;
}

inline std::vector<std::size_t> parse_size_list(std::string_view s) {
    std::vector<std::size_t> out;
    for (auto tok : detail::split(s, ',')) {
        tok = detail::trim(tok);
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size() || tok.empty())
            throw ParseError("cannot parse non-negative integer '" + std::string(tok) + "'");
        out.push_back(v);
    }
    return out;
}

inline Eigen::MatrixXd read_dense(std::istream& is) {
    std::string line;
    bool have_header = false;
    Eigen::Index rows = 0, cols = 0, r = 0;
    Eigen::MatrixXd out;
    while (std::getline(is, line)) {
        const std::string_view t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!have_header) {
            const auto dims = parse_size_list(t);
            if (dims.size() != 2 || dims[0] == 0 || dims[1] == 0)
                throw ParseError("dense header must be 'rows,cols' with positive values");
            rows = static_cast<Eigen::Index>(dims[0]);
            cols = static_cast<Eigen::Index>(dims[1]);
            out.resize(rows, cols);
            have_header = true;
            continue;
        }
        if (r >= rows) throw ParseError("dense data has more than " + std::to_string(rows) + " rows");
        const auto vals = parse_real_list(t);
        if (static_cast<Eigen::Index>(vals.size()) != cols)
            throw ParseError("row " + std::to_string(r + 1) + " has " + std::to_string(vals.size()) +
                             " entries, expected " + std::to_string(cols));
        for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = vals[static_cast<std::size_t>(c)];
        ++r;
    }
    if (!have_header) throw ParseError("dense data: missing 'rows,cols' header");
    if (r != rows) throw ParseError("dense data has " + std::to_string(r) + " rows, expected " + std::to_string(rows));
    return out;
}

inline Eigen::VectorXd read_vector(std::istream& is) {
    const Eigen::MatrixXd m = read_dense(is);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    throw ParseError("expected a vector (n,1 or 1,n), got " + std::to_string(m.rows()) + "," + std::to_string(m.cols()));
}

inline void write_dense(std::ostream& os, const Eigen::MatrixXd& m, int precision = 6) {
    const auto flags = os.flags();
    const double zero_below = 0.5 * std::pow(10.0, -precision);
    os << m.rows() << ',' << m.cols() << '\n' << std::fixed << std::setprecision(precision);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const double v = m(r, c);
            os << (c ? "," : "") << (std::abs(v) < zero_below ? 0.0 : v);
        }
        os << '\n';
    }
    os.flags(flags);
}

namespace detail {
inline double json_real(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_real(j.get<std::string>());
    throw ParseError("expected a number or fraction string");
}
}  // namespace detail

inline PartitionModel model_from_json(const nlohmann::json& j) {
    try {
        std::vector<double> alpha;
        for (const auto& a : j.at("alpha")) alpha.push_back(detail::json_real(a));
        return make_model(j.at("d").get<std::size_t>(), j.at("blocks").get<std::vector<std::size_t>>(), alpha);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.model = model_from_json(j);
    try {
        if (j.contains("strategies")) {
            for (const auto& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
        } else if (j.contains("strategy")) {
            c.strategies.push_back(parse_strategy(j.at("strategy").get<std::string>()));
        } else {
            c.strategies = {Strategy::unit(), Strategy::optimal()};
        }
        const auto& mv = j.at("m_values");
        if (mv.is_array()) {
            c.m_values = mv.get<std::vector<std::size_t>>();
        } else {
            const auto from = mv.at("from").get<std::size_t>();
            const auto to = mv.at("to").get<std::size_t>();
            const auto step = mv.value("step", std::size_t{1});
            if (step == 0) throw ParseError("config: m_values.step must be positive");
            for (std::size_t m = from; m <= to; m += step) c.m_values.push_back(m);
        }
        c.trials_per_m = j.value("trials_per_m", std::size_t{200});
        c.master_seed = j.value("seed", std::uint64_t{0});
        c.success_threshold = j.contains("success_threshold") ? detail::json_real(j.at("success_threshold")) : 1e-3;
        c.threads = j.value("threads", 1u);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    validate_config(c);
    return c;
}

}  // namespace wl1::io
