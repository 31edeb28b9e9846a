#include "cel/metric.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

#include "cel/linalg.hpp"

namespace cel::dsl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return parts;
}

bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

double parse_number(std::string_view s, int line_no, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(std::string(s), &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw SyntaxError(std::string("line ") + std::to_string(line_no) + ": malformed " + what +
                          " '" + std::string(s) + "'");
    }
}

struct RawLine {
    int number;
    std::string key;   // up to the first '='
    std::string value; // after it
};

} // namespace

MetricSpec parse_metric_document(std::string_view text) {
    std::vector<RawLine> lines;
    {
        int line_no = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i != text.size() && text[i] != '\n') continue;
            ++line_no;
            std::string_view line = text.substr(start, i - start);
            start = i + 1;
            if (auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw SyntaxError("line " + std::to_string(line_no) + ": expected '='");
            lines.push_back({line_no, std::string(trim(line.substr(0, eq))),
                             std::string(trim(line.substr(eq + 1)))});
        }
    }

    MetricSpec spec;
    bool have_dim = false, have_coords = false, have_region = false;
    // first pass: dim, coords, region, metadata
    for (const RawLine& l : lines) {
        if (l.key == "dim") {
            if (have_dim) throw DuplicateEntry("line " + std::to_string(l.number) + ": dim given twice");
            long v = 0;
            try {
                std::size_t used = 0;
                v = std::stol(l.value, &used);
                if (used != l.value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw SyntaxError("line " + std::to_string(l.number) + ": malformed dim");
            }
            if (v < 3)
                throw SyntaxError("line " + std::to_string(l.number) +
                                  ": dim must be at least 3, got " + l.value);
            spec.dim = static_cast<int>(v);
            have_dim = true;
        } else if (l.key == "coords") {
            if (have_coords)
                throw DuplicateEntry("line " + std::to_string(l.number) + ": coords given twice");
            for (auto part : split(l.value, ',')) {
                if (!valid_identifier(part))
                    throw SyntaxError("line " + std::to_string(l.number) +
                                      ": bad coordinate name '" + std::string(part) + "'");
                spec.coord_names.emplace_back(part);
            }
            have_coords = true;
        } else if (l.key == "name") {
            spec.name = l.value;
        } else if (l.key == "notes") {
            spec.notes = l.value;
        }
    }
    if (!have_dim) throw MissingDimension("document does not declare dim");
    if (!have_coords) throw SyntaxError("document does not declare coords");
    if (static_cast<int>(spec.coord_names.size()) != spec.dim)
        throw SyntaxError("coords lists " + std::to_string(spec.coord_names.size()) +
                          " names for dim " + std::to_string(spec.dim));
    spec.region.assign(spec.dim, Interval{});

    // second pass: region and entries (need the coordinate names)
    std::vector<ExprPtr> zero(static_cast<std::size_t>(spec.dim) * spec.dim);
    spec.entries = zero;
    std::vector<bool> assigned(static_cast<std::size_t>(spec.dim) * spec.dim, false);
    for (const RawLine& l : lines) {
        if (l.key == "region") {
            if (have_region)
                throw DuplicateEntry("line " + std::to_string(l.number) + ": region given twice");
            have_region = true;
            for (auto part : split(l.value, ',')) {
                auto colon = part.find(':');
                if (colon == std::string_view::npos)
                    throw SyntaxError("line " + std::to_string(l.number) +
                                      ": region entries look like '<coord>: <lo> .. <hi>'");
                std::string_view cname = trim(part.substr(0, colon));
                int ci = -1;
                for (int i = 0; i < spec.dim; ++i)
                    if (spec.coord_names[i] == cname) ci = i;
                if (ci < 0)
                    throw UnknownIdentifier("line " + std::to_string(l.number) +
                                            ": region names unknown coordinate '" +
                                            std::string(cname) + "'");
                std::string_view range = part.substr(colon + 1);
                auto dots = range.find("..");
                if (dots == std::string_view::npos)
                    throw SyntaxError("line " + std::to_string(l.number) +
                                      ": region range needs '..'");
                double lo = parse_number(trim(range.substr(0, dots)), l.number, "region bound");
                double hi = parse_number(trim(range.substr(dots + 2)), l.number, "region bound");
                if (!(lo < hi))
                    throw SyntaxError("line " + std::to_string(l.number) +
                                      ": region bounds must satisfy lo < hi");
                spec.region[ci] = {lo, hi};
            }
        } else if (l.key.size() > 1 && l.key[0] == 'g' && l.key[1] == '[') {
            int i = 0, j = 0;
            if (std::sscanf(l.key.c_str(), "g[%d][%d]", &i, &j) != 2)
                throw SyntaxError("line " + std::to_string(l.number) + ": malformed entry key '" +
                                  l.key + "'");
            if (i < 1 || j < 1 || i > spec.dim || j > spec.dim || i > j)
                throw IndexOutOfRange("line " + std::to_string(l.number) + ": g[" +
                                      std::to_string(i) + "][" + std::to_string(j) +
                                      "] is outside the upper triangle of a " +
                                      std::to_string(spec.dim) + "-dimensional metric");
            const std::size_t idx = static_cast<std::size_t>(i - 1) * spec.dim + (j - 1);
            if (assigned[idx])
                throw DuplicateEntry("line " + std::to_string(l.number) + ": g[" +
                                     std::to_string(i) + "][" + std::to_string(j) +
                                     "] assigned twice");
            ExprPtr e;
            try {
                e = parse_expression(l.value, spec.coord_names);
            } catch (const ParseError& err) {
                throw SyntaxError("line " + std::to_string(l.number) + ": " + err.what());
            }
            assigned[idx] = true;
            spec.entries[idx] = e;
            spec.entries[static_cast<std::size_t>(j - 1) * spec.dim + (i - 1)] = e;
        } else if (l.key != "dim" && l.key != "coords" && l.key != "name" && l.key != "notes") {
            throw SyntaxError("line " + std::to_string(l.number) + ": unknown key '" + l.key + "'");
        }
    }
    ExprPtr zero_expr = Expr::constant(0.0);
    for (auto& e : spec.entries)
        if (!e) e = zero_expr;
    return spec;
}

std::string to_document(const MetricSpec& spec) {
    std::ostringstream out;
    if (!spec.name.empty()) out << "name = " << spec.name << "\n";
    if (!spec.notes.empty()) out << "notes = " << spec.notes << "\n";
    out << "dim = " << spec.dim << "\n";
    out << "coords = ";
    for (int i = 0; i < spec.dim; ++i) out << (i ? ", " : "") << spec.coord_names[i];
    out << "\n";
    auto shortest = [](double v) {
        char buf[40];
        for (int prec = 15; prec <= 17; ++prec) {
            std::snprintf(buf, sizeof buf, "%.*g", prec, v);
            if (std::stod(buf) == v) break;
        }
        return std::string(buf);
    };
    out << "region = ";
    for (int i = 0; i < spec.dim; ++i) {
        out << (i ? ", " : "") << spec.coord_names[i] << ": " << shortest(spec.region[i].lo)
            << " .. " << shortest(spec.region[i].hi);
    }
    out << "\n";
    for (int i = 0; i < spec.dim; ++i)
        for (int j = i; j < spec.dim; ++j) {
            const Expr& e = spec.entry(i, j);
            if (e.kind == Expr::Kind::Constant && e.value == 0.0) continue;
            out << "g[" << (i + 1) << "][" << (j + 1) << "] = "
                << to_string(e, spec.coord_names) << "\n";
        }
    return out.str();
}

MetricJets eval_metric_at(const MetricSpec& spec, std::span<const double> point, int order) {
    if (static_cast<int>(point.size()) != spec.dim)
        throw IndexOutOfRange("point dimension does not match metric dimension");
    MetricJets m;
    m.dim = spec.dim;
    m.order = order;
    m.point.assign(point.begin(), point.end());
    m.g.reserve(static_cast<std::size_t>(spec.dim) * spec.dim);
    for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j) {
            // mirrored entries share AST nodes, so symmetry is structural
            m.g.push_back(eval_jet(spec.entry(std::min(i, j), std::max(i, j)), point, order));
        }

    // positive definiteness of the constant-term matrix
    linalg::Matd g0(spec.dim, spec.dim);
    for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j) g0(i, j) = m.gg(i, j).value();
    auto e = linalg::eigh(g0);
    if (e.values.front() <= 0.0)
        throw SingularMetric("metric is not positive definite at the sample point",
                             e.values.front());

    std::vector<jets::Jet> rhs;
    rhs.reserve(m.g.size());
    for (int i = 0; i < spec.dim; ++i)
        for (int j = 0; j < spec.dim; ++j)
            rhs.push_back(jets::Jet::constant(i == j ? 1.0 : 0.0, spec.dim, order));
    m.g_inv = linalg::solve_jet_linear(spec.dim, spec.dim, m.g, std::move(rhs));
    return m;
}

} // namespace cel::dsl
