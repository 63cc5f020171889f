#pragma once

// Subcommands of the pcglasso tool. Each returns a process exit code and writes its files
// into an output directory; human-readable progress goes to `out`.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pcglasso/pcglasso.hpp"

namespace pcglasso::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Invalid combination of command-line options.
class UsageError : public Error {
public:
    using Error::Error;
};

struct PathOptions {
    int rho_count = 50;
    double rho_min_ratio = 0.01;
    double gamma = 0.5;
    double epsilon = 1e-8;
    int max_sweeps = 500;
    std::uint64_t seed = 0;

    void validate() const {
        if (rho_count < 2) throw UsageError("--rho-count must be at least 2");
        if (!(rho_min_ratio > 0.0 && rho_min_ratio < 1.0)) throw UsageError("--rho-min-ratio must be in (0, 1)");
        if (!(gamma >= 0.0 && gamma <= 1.0)) throw UsageError("--gamma must be in [0, 1]");
        if (!(epsilon > 0.0)) throw UsageError("--epsilon must be positive");
        if (max_sweeps < 1) throw UsageError("--max-sweeps must be at least 1");
    }

    DescentConfig descent() const {
        DescentConfig cfg;
        cfg.epsilon = epsilon;
        cfg.max_sweeps = max_sweeps;
        cfg.rng_seed = seed;
        return cfg;
    }
};

/// Where the covariance comes from: a data CSV, or a matrix CSV plus its sample size.
struct InputSpec {
    std::string data;
    std::string cov;
    std::int64_t n = 0;
};

struct LoadedInput {
    CovMatrix cov;
    std::optional<Matrix> data;
    std::vector<std::string> names;
};

inline LoadedInput load_input(const InputSpec& in) {
    if (in.data.empty() == in.cov.empty()) throw UsageError("give exactly one of --input or --cov");
    try {
        if (!in.data.empty()) {
            io::Table t = io::read_data_csv(in.data);
            if (t.values.rows() < 2) throw DataError(in.data + ": need at least 2 rows");
            CovMatrix s = sample_cov(t.values);
            return {std::move(s), std::move(t.values), std::move(t.header)};
        }
        if (in.n < 2) throw UsageError("--cov needs --n (sample size, at least 2)");
        return {CovMatrix(io::read_matrix_csv(in.cov), in.n), std::nullopt, {}};
    } catch (const InvalidArgument& e) {
        throw DataError(e.what());
    }
}

inline std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path p = dir.empty() ? std::filesystem::path(".") : std::filesystem::path(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec || !std::filesystem::is_directory(p)) throw DataError("cannot create output directory '" + p.string() + "'");
    return p;
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw DataError("cannot write '" + file.string() + "'");
    out << text;
}

inline std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

inline PathResult run_path(const CovMatrix& s, const PathOptions& o) {
    const RhoGrid grid = default_rho_grid(s, o.rho_count, o.rho_min_ratio);
    return regularization_path(s, grid.values, o.descent());
}

inline int report_convergence(const PathResult& path, std::ostream& out) {
    int bad = 0;
    for (std::size_t k = 0; k < path.size(); ++k)
        if (!path.converged[k]) ++bad;
    if (bad) out << "warning: " << bad << " of " << path.size() << " path points hit --max-sweeps\n";
    return bad;
}

// fit ------------------------------------------------------------------------------------

inline std::string path_summary_csv(const std::vector<SelectionScore>& scores) {
    std::ostringstream s;
    s << "rho,edges,loglik,bic,ebic\n";
    for (const auto& sc : scores)
        s << io::format_double(sc.rho) << ',' << sc.edges << ',' << io::format_double(sc.loglik) << ','
          << io::format_double(sc.bic) << ',' << io::format_double(sc.ebic) << '\n';
    return s.str();
}

inline int cmd_fit(const InputSpec& in, const std::string& output_dir, const PathOptions& o, std::ostream& out) {
    o.validate();
    const LoadedInput li = load_input(in);
    const auto dir = prepare_dir(output_dir);
    const PathResult path = run_path(li.cov, o);
    const auto scores = score_path(path, li.cov, o.gamma);
    const Selection sel = select(scores);

    std::ostringstream m;
    io::write_matrix(m, recompose(path.estimates[sel.by_bic]));
    write_text(dir / "theta_bic.csv", m.str());
    m.str("");
    io::write_matrix(m, recompose(path.estimates[sel.by_ebic]));
    write_text(dir / "theta_ebic.csv", m.str());
    write_text(dir / "path_summary.csv", path_summary_csv(scores));

    const Index p = li.cov.p();
    auto name = [&](Index i) { return i < static_cast<Index>(li.names.size()) ? li.names[i] : "V" + std::to_string(i + 1); };
    for (auto [label, idx] : {std::pair{"BIC", sel.by_bic}, std::pair{"EBIC", sel.by_ebic}}) {
        const auto& est = path.estimates[idx];
        out << label << ": rho = " << io::format_double(path.rhos[idx]) << ", edges = " << est.edge_count() << '\n';
        if (p == 1) {
            out << "  precision " << name(0) << " = " << io::format_double(est.theta()(0)) << '\n';
            continue;
        }
        for (Index i = 0; i < p; ++i)
            for (Index j = i + 1; j < p; ++j)
                if (est.delta()(i, j) != 0.0)
                    out << "  pcor(" << name(i) << ", " << name(j) << ") = " << fixed(-est.delta()(i, j), 6) << '\n';
    }
    report_convergence(path, out);
    return kOk;
}

// path -----------------------------------------------------------------------------------

inline std::string path_long_csv(const PathResult& path) {
    std::ostringstream s;
    s << "rho,i,j,delta_hat\n";
    for (std::size_t k = 0; k < path.size(); ++k) {
        const Matrix& d = path.estimates[k].delta();
        for (Index i = 0; i < d.rows(); ++i)
            for (Index j = i + 1; j < d.cols(); ++j)
                s << io::format_double(path.rhos[k]) << ',' << i + 1 << ',' << j + 1 << ','
                  << io::format_double(d(i, j)) << '\n';
    }
    return s.str();
}

inline int cmd_path(const InputSpec& in, const std::string& truth_csv, const std::string& output_dir,
                    const PathOptions& o, std::ostream& out) {
    o.validate();
    const LoadedInput li = load_input(in);
    std::optional<Matrix> truth;
    if (!truth_csv.empty()) {
        truth = io::read_matrix_csv(truth_csv);
        if (truth->rows() != li.cov.p()) throw DataError("truth matrix dimension does not match the input");
    }
    const auto dir = prepare_dir(output_dir);
    const PathResult path = run_path(li.cov, o);
    write_text(dir / "path.csv", path_long_csv(path));
    write_text(dir / "path.svg", svg::path_plot(path, truth));
    out << "wrote " << path.size() << " path points for p = " << li.cov.p() << '\n';
    report_convergence(path, out);
    return kOk;
}

// simulate -------------------------------------------------------------------------------

struct SimulationSpec {
    ScenarioKind kind = ScenarioKind::star;
    Index p = 20;
    Index n = 100;
    int reps = 20;
    std::uint64_t seed = 0;
    int threads = 0;  ///< 0: hardware concurrency
};

struct ReplicateResult {
    int rep = 0;
    double rho = 0.0;
    std::size_t edges = 0;
    MetricsRecord metrics;
    bool converged = true;
    bool monotone = true;
};

/// One replicate: truth from the scenario, n Gaussian rows, path, BIC selection, metrics.
/// Replicate r uses seed + r for the data and a distinct derived seed for a random truth.
inline ReplicateResult run_replicate(const SimulationSpec& spec, int rep, const PathOptions& o) {
    const std::uint64_t s = spec.seed + static_cast<std::uint64_t>(rep);
    const Matrix truth = make_truth({spec.kind, spec.p, ~s});
    const CovMatrix cov = sample_cov(sample_gaussian(truth, spec.n, s));
    PathOptions po = o;
    po.seed = s;
    const PathResult path = run_path(cov, po);
    const Selection sel = select(path, cov, o.gamma);
    ReplicateResult r;
    r.rep = rep;
    r.rho = path.rhos[sel.by_bic];
    r.edges = path.estimates[sel.by_bic].edge_count();
    r.metrics = evaluate(truth, path.estimates[sel.by_bic]);
    r.converged = path.all_converged();
    r.monotone = path.all_monotone();
    return r;
}

/// Replicates run on a small thread pool; the result vector is ordered by replicate.
inline std::vector<ReplicateResult> run_replicates(const SimulationSpec& spec, const PathOptions& o) {
    std::vector<ReplicateResult> res(static_cast<std::size_t>(spec.reps));
    std::vector<std::string> errors(res.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned nthreads = std::min<unsigned>(spec.threads > 0 ? spec.threads : hw, spec.reps);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int r = next++; r < spec.reps; r = next++) {
            try {
                res[r] = run_replicate(spec, r, o);
            } catch (const std::exception& e) {
                errors[r] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (std::size_t r = 0; r < errors.size(); ++r)
        if (!errors[r].empty()) throw NumericalError("replicate " + std::to_string(r) + ": " + errors[r]);
    return res;
}

struct MeanSd {
    double mean = 0.0;
    double sd = std::nan("");
};

inline MeanSd mean_sd(const std::vector<double>& v) {
    MeanSd m;
    std::size_t k = 0;
    double sum = 0.0;
    for (double x : v)
        if (!std::isnan(x)) {
            sum += x;
            ++k;
        }
    if (k == 0) return {std::nan(""), std::nan("")};
    m.mean = sum / static_cast<double>(k);
    if (k > 1) {
        double ss = 0.0;
        for (double x : v)
            if (!std::isnan(x)) ss += (x - m.mean) * (x - m.mean);
        m.sd = std::sqrt(ss / static_cast<double>(k - 1));
    }
    return m;
}

/// "0.70 (0.11)"; the sd is shown as NA with a single replicate.
inline std::string format_mean_sd(const MeanSd& m, int digits = 2) {
    if (std::isnan(m.mean)) return "NA";
    return fixed(m.mean, digits) + " (" + (std::isnan(m.sd) ? std::string("NA") : fixed(m.sd, digits)) + ")";
}

inline std::string replicate_csv(const std::vector<ReplicateResult>& rs) {
    std::ostringstream s;
    s << "rep,rho,edges,kl,fnorm,mcc,sensitivity,specificity,tp,tn,fp,fn\n";
    for (const auto& r : rs) {
        const auto& m = r.metrics;
        s << r.rep << ',' << io::format_double(r.rho) << ',' << r.edges << ',' << io::format_double(m.kl) << ','
          << io::format_double(m.fnorm) << ',' << io::format_double(m.mcc) << ','
          << io::format_double(m.sensitivity) << ',' << io::format_double(m.specificity) << ',' << m.counts.tp
          << ',' << m.counts.tn << ',' << m.counts.fp << ',' << m.counts.fn << '\n';
    }
    return s.str();
}

inline std::vector<MeanSd> summarize(const std::vector<ReplicateResult>& rs) {
    std::vector<double> kl, fn, mcc, sens, spec;
    for (const auto& r : rs) {
        kl.push_back(r.metrics.kl);
        fn.push_back(r.metrics.fnorm);
        mcc.push_back(r.metrics.mcc);
        sens.push_back(r.metrics.sensitivity);
        spec.push_back(r.metrics.specificity);
    }
    return {mean_sd(kl), mean_sd(fn), mean_sd(mcc), mean_sd(sens), mean_sd(spec)};
}

/// `scenarios` holds one name or "all".
inline int cmd_simulate(const std::string& scenarios, SimulationSpec spec, const std::string& output_dir,
                        const PathOptions& o, std::ostream& out) {
    o.validate();
    if (spec.reps < 1) throw UsageError("--reps must be at least 1");
    if (spec.n < 5) throw UsageError("--n must be at least 5");
    std::vector<ScenarioKind> kinds;
    if (scenarios == "all") {
        kinds = {ScenarioKind::star, ScenarioKind::hub, ScenarioKind::ar2, ScenarioKind::random};
    } else {
        try {
            kinds = {parse_scenario(scenarios)};
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
    }
    for (auto k : kinds) {
        try {
            (void)make_truth({k, spec.p, 0});
        } catch (const InvalidArgument& e) {
            throw UsageError(std::string(to_string(k)) + ": " + e.what());
        }
    }
    const auto dir = prepare_dir(output_dir);
    std::ostringstream summary;
    summary << "scenario,p,n,reps,kl,fnorm,mcc,sensitivity,specificity\n";
    bool healthy = true;
    for (auto k : kinds) {
        spec.kind = k;
        const auto rs = run_replicates(spec, o);
        write_text(dir / ("metrics_" + std::string(to_string(k)) + ".csv"), replicate_csv(rs));
        const auto sm = summarize(rs);
        summary << to_string(k) << ',' << spec.p << ',' << spec.n << ',' << spec.reps;
        for (const auto& m : sm) summary << ",\"" << format_mean_sd(m) << '"';
        summary << '\n';
        out << to_string(k) << ": KL " << format_mean_sd(sm[0]) << ", FNorm " << format_mean_sd(sm[1]) << ", MCC "
            << format_mean_sd(sm[2]) << ", sensitivity " << format_mean_sd(sm[3]) << ", specificity "
            << format_mean_sd(sm[4]) << '\n';
        for (const auto& r : rs) {
            if (!r.monotone) healthy = false;
            if (!r.converged) out << "warning: replicate " << r.rep << " hit --max-sweeps\n";
        }
    }
    write_text(dir / "summary.csv", summary.str());
    if (!healthy) {
        out << "error: an objective trace decreased\n";
        return kNumerical;
    }
    return kOk;
}

// eval -----------------------------------------------------------------------------------

inline int cmd_eval(const std::string& train_csv, const std::string& test_csv, const std::string& output_dir,
                    const PathOptions& o, std::ostream& out) {
    o.validate();
    if (train_csv.empty() || test_csv.empty()) throw UsageError("eval needs --train and --test");
    const LoadedInput train = load_input({train_csv, "", 0});
    Matrix test;
    try {
        test = io::read_data_csv(test_csv).values;
    } catch (const InvalidArgument& e) {
        throw DataError(e.what());
    }
    if (test.cols() != train.cov.p())
        throw DataError("column mismatch: training data has " + std::to_string(train.cov.p()) +
                        " columns, test data has " + std::to_string(test.cols()));
    const auto dir = prepare_dir(output_dir);
    const PathResult path = run_path(train.cov, o);
    const auto scores = score_path(path, train.cov, o.gamma);
    const Selection sel = select(scores);
    const Vector center = column_means(*train.data);
    std::ostringstream s;
    s << "rho,edges,holdout_loglik,bic,ebic,selected_bic,selected_ebic\n";
    for (std::size_t k = 0; k < path.size(); ++k)
        s << io::format_double(path.rhos[k]) << ',' << scores[k].edges << ','
          << io::format_double(holdout_loglik(path.estimates[k], test, center)) << ','
          << io::format_double(scores[k].bic) << ',' << io::format_double(scores[k].ebic) << ','
          << (k == sel.by_bic) << ',' << (k == sel.by_ebic) << '\n';
    write_text(dir / "eval.csv", s.str());
    out << "BIC selects " << scores[sel.by_bic].edges << " edges, EBIC selects " << scores[sel.by_ebic].edges
        << " edges\n";
    report_convergence(path, out);
    return kOk;
}

// check-invariance -----------------------------------------------------------------------

struct InvarianceReport {
    double max_deviation = 0.0;
    bool supports_match = true;
    Vector scaling;
};

/// Paths for S and DSD on the same grid: the largest elementwise deviation of
/// D^{-1} Theta(S) D^{-1} from Theta(DSD), relative to sqrt(Theta_ii Theta_jj).
inline InvarianceReport check_invariance(const CovMatrix& s, const Vector& d, const PathOptions& o) {
    const CovMatrix ds(d.asDiagonal() * s.s() * d.asDiagonal(), s.n());
    const RhoGrid grid = default_rho_grid(s, o.rho_count, o.rho_min_ratio);
    const PathResult a = regularization_path(s, grid.values, o.descent());
    const PathResult b = regularization_path(ds, grid.values, o.descent());
    InvarianceReport rep;
    rep.scaling = d;
    const Vector dinv = d.cwiseInverse();
    for (std::size_t k = 0; k < a.size(); ++k) {
        const Matrix ta = dinv.asDiagonal() * recompose(a.estimates[k]) * dinv.asDiagonal();
        const Matrix tb = recompose(b.estimates[k]);
        for (Index i = 0; i < ta.rows(); ++i)
            for (Index j = 0; j < ta.cols(); ++j) {
                const double scale = std::sqrt(tb(i, i) * tb(j, j));
                rep.max_deviation = std::max(rep.max_deviation, std::abs(ta(i, j) - tb(i, j)) / scale);
                if ((ta(i, j) == 0.0) != (tb(i, j) == 0.0)) rep.supports_match = false;
            }
    }
    return rep;
}

/// Random D with entries +-exp(U(-2, 2)), both signs.
inline Vector random_scaling(Index p, std::uint64_t seed) {
    Rng rng(seed);
    Vector d(p);
    for (Index i = 0; i < p; ++i) {
        const double mag = std::exp(rng.uniform(-2.0, 2.0));
        d(i) = rng.uniform() < 0.5 ? -mag : mag;
    }
    return d;
}

inline constexpr double kInvarianceTol = 1e-6;

inline int cmd_check_invariance(const InputSpec& in, bool identity, const PathOptions& o, std::ostream& out) {
    o.validate();
    const LoadedInput li = load_input(in);
    const Vector d = identity ? Vector::Ones(li.cov.p()) : random_scaling(li.cov.p(), o.seed);
    const InvarianceReport r = check_invariance(li.cov, d, o);
    const bool pass = r.max_deviation < kInvarianceTol && r.supports_match;
    out << "scaling D = diag(";
    for (Index i = 0; i < d.size(); ++i) out << (i ? ", " : "") << fixed(d(i), 4);
    out << ")\n";
    out << "max relative deviation: " << r.max_deviation << '\n';
    out << "supports match: " << (r.supports_match ? "yes" : "no") << '\n';
    out << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kOk : kNumerical;
}

}  // namespace pcglasso::cli
