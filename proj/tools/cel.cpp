// Command line front end: validate metric documents, classify metrics
// against the conformally-Einstein necessary conditions, and verify the
// conformal transformation laws.
//
// Exit codes: 0 success, 1 parse/config error, 2 numeric failure,
// 3 internal assertion.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cel/catalog.hpp"
#include "cel/report.hpp"
#include "cel/sampling.hpp"

namespace {

struct RunConfig {
    std::string metric;
    int points = 20;
    std::uint64_t seed = 1;
    int order = 4;
    double tol = 1e-6;
    double rank_tol = 1e-8;
    std::string phi;
    std::string out;
    std::string corrupt;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cel::ParseError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "catalog:NAME" or a document path
cel::dsl::MetricSpec resolve_metric(const std::string& source) {
    if (source.rfind("catalog:", 0) == 0) return cel::catalog::get(source.substr(8)).spec;
    cel::dsl::MetricSpec spec = cel::dsl::parse_metric_document(read_file(source));
    if (spec.name.empty()) spec.name = source;
    return spec;
}

// an expression, or a path to a file holding one ('#' comments allowed)
cel::dsl::ConformalFactorSpec resolve_phi(const std::string& source,
                                          const cel::dsl::MetricSpec& spec) {
    std::string text = source;
    if (std::ifstream probe(source); probe.good()) {
        text.clear();
        std::string raw = read_file(source);
        std::istringstream lines(raw);
        for (std::string line; std::getline(lines, line);) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            text += line + " ";
        }
    }
    return {cel::dsl::parse_expression(text, spec.coord_names)};
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::fputs(content.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cel::ParseError("cannot open output file '" + path + "'");
    out << content;
}

cel::invariants::Tolerances tolerances(const RunConfig& cfg) {
    cel::invariants::Tolerances t;
    t.vanish = cfg.tol;
    t.rank_rel = cfg.rank_tol;
    return t;
}

int cmd_validate(const std::string& path) {
    try {
        cel::dsl::MetricSpec spec = cel::dsl::parse_metric_document(read_file(path));
        std::printf("OK: dim=%d, coords=", spec.dim);
        for (int i = 0; i < spec.dim; ++i)
            std::printf("%s%s", i ? "," : "", spec.coord_names[i].c_str());
        std::printf("\n");
        return 0;
    } catch (const cel::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

int cmd_classify(const RunConfig& cfg) {
    cel::dsl::MetricSpec spec = resolve_metric(cfg.metric);
    auto points = cel::sampling::sample_points(spec, cfg.points, cfg.seed);
    auto result = cel::invariants::classify(spec, points, cfg.order, tolerances(cfg));
    write_output(cfg.out, cel::report::classification_records(result, cfg.seed));
    if (!cfg.out.empty())
        std::printf("%s: %s (%zu points)\n", result.spec_name.c_str(),
                    cel::invariants::to_string(result.aggregate), result.points.size());
    bool all_failed = !result.points.empty();
    for (const auto& r : result.points) all_failed = all_failed && r.failed;
    if (all_failed) {
        std::fprintf(stderr, "numeric failure at every sample point: %s\n",
                     result.points.front().reason.c_str());
        return 2;
    }
    return 0;
}

int cmd_conformal_check(const RunConfig& cfg) {
    cel::dsl::MetricSpec spec = resolve_metric(cfg.metric);
    cel::dsl::ConformalFactorSpec phi = resolve_phi(cfg.phi, spec);
    auto points = cel::sampling::sample_points(spec, cfg.points, cfg.seed);
    auto rep = cel::lab::check_transformation_laws(spec, phi, points, tolerances(cfg));
    if (!cfg.corrupt.empty()) {
        // test hook: force one law to fail to exercise the failure path
        bool known = false;
        for (const char* name : cel::lab::kLawNames) known = known || cfg.corrupt == name;
        if (!known) throw cel::ParseError("--corrupt names unknown law '" + cfg.corrupt + "'");
        for (auto& p : rep.points)
            for (auto& l : p.laws)
                if (cfg.corrupt == l.law) {
                    l.residual += 1.0;
                    l.available = true;
                    l.applicable = true;
                }
        rep.all_pass = false;
        rep.max_residual = std::max(rep.max_residual, 1.0);
    }
    write_output(cfg.out, cel::report::law_records(rep, cfg.seed));
    if (rep.all_pass) {
        if (!cfg.out.empty())
            std::printf("%s: all laws pass (max residual %.3g)\n", rep.spec_name.c_str(),
                        rep.max_residual);
        return 0;
    }
    for (const auto& p : rep.points)
        for (const auto& l : p.laws)
            if (l.available && l.applicable && !(l.residual < rep.tolerance))
                std::fprintf(stderr, "law failed: %s (residual %.3g)\n", l.law, l.residual);
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conformal curvature laboratory"};
    app.require_subcommand(1);

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "parse a metric document");
    validate->add_option("file", validate_path, "metric document")->required();

    RunConfig cfg;
    auto add_common = [&cfg](CLI::App* c) {
        c->add_option("--metric", cfg.metric, "document path or catalog:NAME")->required();
        c->add_option("--points", cfg.points, "sample point count")->check(CLI::Range(1, 100000));
        c->add_option("--seed", cfg.seed, "sampling seed");
        c->add_option("--order", cfg.order, "jet truncation order")->check(CLI::Range(2, 4));
        c->add_option("--tol", cfg.tol, "vanishing tolerance")
            ->check(CLI::PositiveNumber);
        c->add_option("--rank-tol", cfg.rank_tol, "relative spectral threshold")
            ->check(CLI::PositiveNumber);
        c->add_option("--out", cfg.out, "output path (default stdout)");
    };

    CLI::App* classify = app.add_subcommand("classify", "run the invariant pipeline");
    add_common(classify);

    CLI::App* conformal = app.add_subcommand("conformal-check", "verify the transformation laws");
    add_common(conformal);
    conformal->add_option("--phi", cfg.phi, "conformal factor expression or file")->required();
    conformal->add_option("--corrupt", cfg.corrupt, "test hook: force a named law to fail")
        ->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_path);
        if (classify->parsed()) return cmd_classify(cfg);
        if (conformal->parsed()) return cmd_conformal_check(cfg);
    } catch (const cel::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const cel::UnknownEntry& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const cel::curv::InternalCheck& e) {
        std::fprintf(stderr, "internal check failed: %s\n", e.what());
        return 3;
    } catch (const cel::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
