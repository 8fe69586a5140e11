#include "divmdp/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "divmdp/csv.hpp"
#include "divmdp/estimation.hpp"
#include "divmdp/montecarlo.hpp"

namespace divmdp::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_fail(const std::string& msg) {
    throw std::runtime_error("config error: " + msg);
}

void check_keys(const json& obj, const char* context,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) config_fail("unknown key '" + it.key() + "' in " + context);
    }
}

const json& require_key(const json& obj, const char* key, const char* context) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        config_fail("missing key '" + std::string(key) + "' in " + std::string(context));
    }
    return *it;
}

double number_of(const json& v, const std::string& what) {
    if (!v.is_number()) config_fail(what + " must be a number");
    return v.get<double>();
}

std::uint64_t uint_of(const json& v, const std::string& what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    config_fail(what + " must be a nonnegative integer");
}

std::string string_of(const json& v, const std::string& what) {
    if (!v.is_string()) config_fail(what + " must be a string");
    return v.get<std::string>();
}

// Deterministic serializer: objects sorted (nlohmann default), floats with
// 17 significant digits.
void dump_json(const json& v, std::ostream& os) {
    switch (v.type()) {
        case json::value_t::object: {
            os << '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) os << ',';
                first = false;
                os << '"' << it.key() << "\":";
                dump_json(it.value(), os);
            }
            os << '}';
            break;
        }
        case json::value_t::array: {
            os << '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i != 0) os << ',';
                dump_json(v[i], os);
            }
            os << ']';
            break;
        }
        case json::value_t::string: {
            os << '"';
            for (char c : v.get<std::string>()) {
                switch (c) {
                    case '"': os << "\\\""; break;
                    case '\\': os << "\\\\"; break;
                    case '\n': os << "\\n"; break;
                    case '\t': os << "\\t"; break;
                    case '\r': os << "\\r"; break;
                    default: os << c;
                }
            }
            os << '"';
            break;
        }
        case json::value_t::number_float:
            os << csv::format_double(v.get<double>());
            break;
        case json::value_t::number_integer:
            os << v.get<std::int64_t>();
            break;
        case json::value_t::number_unsigned:
            os << v.get<std::uint64_t>();
            break;
        case json::value_t::boolean:
            os << (v.get<bool>() ? "true" : "false");
            break;
        default:
            os << "null";
    }
}

std::string dump_json(const json& v) {
    std::ostringstream os;
    dump_json(v, os);
    return os.str();
}

Transform parse_transform(const std::string& name) {
    if (name == "none") return Transform::None;
    if (name == "tsallis") return Transform::Tsallis;
    if (name == "renyi") return Transform::Renyi;
    if (name == "hill") return Transform::Hill;
    config_fail("unknown transform '" + name + "'");
}

const char* transform_name(Transform t) {
    switch (t) {
        case Transform::None: return "none";
        case Transform::Tsallis: return "tsallis";
        case Transform::Renyi: return "renyi";
        case Transform::Hill: return "hill";
    }
    return "none";
}

TriangularFamily parse_distribution(const json& d, json& resolved) {
    if (!d.is_object()) config_fail("distribution must be an object");
    const std::string kind = string_of(require_key(d, "kind", "distribution"),
                                       "distribution.kind");
    resolved = json::object();
    resolved["kind"] = kind;
    if (kind == "finite") {
        check_keys(d, "distribution", {"kind", "weights", "weights_csv"});
        std::vector<double> weights;
        if (d.contains("weights") && d.contains("weights_csv")) {
            config_fail("finite distribution takes either weights or weights_csv");
        }
        if (d.contains("weights")) {
            const json& w = d["weights"];
            if (!w.is_array() || w.empty())
                config_fail("distribution.weights must be a nonempty array");
            for (const auto& x : w) weights.push_back(number_of(x, "weight"));
        } else if (d.contains("weights_csv")) {
            const std::string path =
                string_of(d["weights_csv"], "distribution.weights_csv");
            for (const auto& row : csv::read_weights_file(path)) {
                weights.push_back(row.weight);
            }
            if (weights.empty()) config_fail(path + ": no weight rows");
        } else {
            config_fail("finite distribution needs weights or weights_csv");
        }
        resolved["weights"] = weights;
        return TriangularFamily::fixed(CountableDistribution::finite(weights));
    }
    if (kind == "geometric") {
        check_keys(d, "distribution", {"kind", "q"});
        const double q = number_of(require_key(d, "q", "distribution"), "q");
        resolved["q"] = q;
        return TriangularFamily::fixed(CountableDistribution::geometric(q));
    }
    if (kind == "zeta") {
        check_keys(d, "distribution", {"kind", "s"});
        const double s = number_of(require_key(d, "s", "distribution"), "s");
        resolved["s"] = s;
        return TriangularFamily::fixed(CountableDistribution::zeta(s));
    }
    if (kind == "two_point_perturbed") {
        check_keys(d, "distribution", {"kind", "gamma", "n"});
        const double gamma =
            number_of(require_key(d, "gamma", "distribution"), "gamma");
        const std::uint64_t n = uint_of(require_key(d, "n", "distribution"), "n");
        resolved["gamma"] = gamma;
        resolved["n"] = n;
        return TriangularFamily::fixed(
            CountableDistribution::two_point_perturbed(gamma, n));
    }
    if (kind == "two_point_family") {
        check_keys(d, "distribution", {"kind", "gamma"});
        const double gamma =
            number_of(require_key(d, "gamma", "distribution"), "gamma");
        resolved["gamma"] = gamma;
        return TriangularFamily::two_point(gamma);
    }
    if (kind == "geometric_family") {
        check_keys(d, "distribution", {"kind", "alpha"});
        const double alpha =
            number_of(require_key(d, "alpha", "distribution"), "alpha");
        resolved["alpha"] = alpha;
        return TriangularFamily::geometric_decay(alpha);
    }
    config_fail("unknown distribution kind '" + kind + "'");
}

IndexFamily parse_index(const json& v, json& resolved) {
    if (!v.is_object()) config_fail("index must be an object");
    check_keys(v, "index", {"alpha", "gamma", "transform"});
    const double alpha = number_of(require_key(v, "alpha", "index"), "index.alpha");
    const double gamma =
        v.contains("gamma") ? number_of(v["gamma"], "index.gamma") : 0.0;
    const Transform transform =
        v.contains("transform")
            ? parse_transform(string_of(v["transform"], "index.transform"))
            : Transform::None;
    resolved = json::object();
    resolved["alpha"] = alpha;
    resolved["gamma"] = gamma;
    resolved["transform"] = transform_name(transform);
    return IndexFamily(alpha, gamma, transform);
}

MdpScaleSpec parse_scale(const json& v, json& resolved) {
    if (!v.is_object()) config_fail("scale must be an object");
    const std::string form = string_of(require_key(v, "form", "scale"), "scale.form");
    resolved = json::object();
    resolved["form"] = form;
    if (form == "power") {
        check_keys(v, "scale", {"form", "c", "rho"});
        const double c = number_of(require_key(v, "c", "scale"), "scale.c");
        const double rho = number_of(require_key(v, "rho", "scale"), "scale.rho");
        resolved["c"] = c;
        resolved["rho"] = rho;
        return MdpScaleSpec::power(c, rho);
    }
    if (form == "log_power") {
        check_keys(v, "scale", {"form", "c", "kappa"});
        const double c = number_of(require_key(v, "c", "scale"), "scale.c");
        const double kappa = number_of(require_key(v, "kappa", "scale"), "scale.kappa");
        resolved["c"] = c;
        resolved["kappa"] = kappa;
        return MdpScaleSpec::log_power(c, kappa);
    }
    config_fail("unknown scale form '" + form + "'");
}

enum class Command { Validate, Simulate, Rate };

struct ParsedExperiment {
    TriangularFamily dists;
    IndexFamily family;
    MdpScaleSpec scale;
    std::vector<std::uint64_t> n_grid;
    std::uint64_t replicates = 0;
    std::vector<double> r_grid;
    std::uint64_t master_seed = 0;
    double tol = 1e-10;
    json resolved;
};

ParsedExperiment parse_experiment(const std::string& path, Command cmd,
                                  const CommonOptions& common) {
    std::ifstream file(path);
    if (!file) config_fail("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(file);
    } catch (const json::parse_error& e) {
        config_fail(path + ": " + e.what());
    }
    if (!root.is_object()) config_fail("config root must be an object");

    std::vector<const char*> allowed = {"distribution", "index", "scale", "n_grid",
                                        "tol"};
    if (cmd != Command::Validate) {
        allowed.push_back("replicates");
        allowed.push_back("master_seed");
    }
    if (cmd == Command::Rate) allowed.push_back("r_grid");
    for (auto it = root.begin(); it != root.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) config_fail("unknown key '" + it.key() + "' in config");
    }

    json resolved = json::object();
    json dist_resolved;
    json index_resolved;
    json scale_resolved;
    TriangularFamily dists =
        parse_distribution(require_key(root, "distribution", "config"), dist_resolved);
    IndexFamily family = parse_index(require_key(root, "index", "config"),
                                     index_resolved);
    MdpScaleSpec scale = parse_scale(require_key(root, "scale", "config"),
                                     scale_resolved);

    const json& grid = require_key(root, "n_grid", "config");
    if (!grid.is_array() || grid.size() < 2)
        config_fail("n_grid must be an array of at least two sample sizes");
    std::vector<std::uint64_t> n_grid;
    for (const auto& v : grid) {
        const std::uint64_t n = uint_of(v, "n_grid entry");
        if (n == 0) config_fail("n_grid entries must be positive");
        if (!n_grid.empty() && n <= n_grid.back())
            config_fail("n_grid must be strictly increasing");
        n_grid.push_back(n);
    }

    ParsedExperiment parsed{std::move(dists), family, scale, std::move(n_grid),
                            0,               {},     0,     1e-10, json::object()};

    if (root.contains("tol")) {
        parsed.tol = number_of(root["tol"], "tol");
        if (!(parsed.tol > 0.0)) config_fail("tol must be positive");
    }

    if (cmd != Command::Validate) {
        parsed.replicates =
            uint_of(require_key(root, "replicates", "config"), "replicates");
        parsed.master_seed =
            uint_of(require_key(root, "master_seed", "config"), "master_seed");
        if (common.seed) parsed.master_seed = *common.seed;
    }
    if (cmd == Command::Rate) {
        const json& rg = require_key(root, "r_grid", "config");
        if (!rg.is_array() || rg.empty())
            config_fail("r_grid must be a nonempty array of positive reals");
        for (const auto& v : rg) {
            const double r = number_of(v, "r_grid entry");
            if (!(r > 0.0)) config_fail("r_grid entries must be positive");
            parsed.r_grid.push_back(r);
        }
    }

    resolved["distribution"] = dist_resolved;
    resolved["index"] = index_resolved;
    resolved["scale"] = scale_resolved;
    resolved["n_grid"] = parsed.n_grid;
    resolved["tol"] = parsed.tol;
    if (cmd != Command::Validate) {
        resolved["replicates"] = parsed.replicates;
        resolved["master_seed"] = parsed.master_seed;
    }
    if (cmd == Command::Rate) resolved["r_grid"] = parsed.r_grid;
    parsed.resolved = std::move(resolved);
    return parsed;
}

void echo_resolved(const ParsedExperiment& parsed, std::ostream& err) {
    json echo = parsed.resolved;
    json b_n = json::array();
    for (std::uint64_t n : parsed.n_grid) b_n.push_back(parsed.scale.b(n));
    echo["derived_b_n"] = b_n;
    err << "resolved config: " << dump_json(echo) << "\n";
}

// Runs `writer` against --out (if given) or the fallback stream.
template <typename Writer>
int with_output(const CommonOptions& common, std::ostream& fallback,
                std::ostream& err, Writer writer) {
    if (common.out_path.empty()) {
        writer(fallback);
        return 0;
    }
    std::ofstream file(common.out_path);
    if (!file) {
        err << "error: cannot open output file: " << common.out_path << "\n";
        return 2;
    }
    writer(file);
    return 0;
}

json rate_point_to_json(const RatePoint& p) {
    json row = json::object();
    row["n"] = p.n;
    row["b_n"] = p.b_n;
    row["r"] = p.r;
    row["p_hat"] = p.p_hat;
    row["L_hat"] = p.l_hat;
    row["se"] = p.se;
    row["censored"] = p.censored ? 1 : 0;
    return row;
}

void write_rate_curve(const RateCurve& curve, OutputFormat format, std::ostream& os) {
    if (format == OutputFormat::Csv) {
        os << "n,b_n,r,p_hat,L_hat,se,censored\n";
        for (const auto& p : curve.points) {
            os << p.n << ',' << csv::format_double(p.b_n) << ','
               << csv::format_double(p.r) << ',' << csv::format_double(p.p_hat) << ','
               << csv::format_double(p.l_hat) << ',' << csv::format_double(p.se)
               << ',' << (p.censored ? 1 : 0) << "\n";
        }
        return;
    }
    json rows = json::array();
    for (const auto& p : curve.points) rows.push_back(rate_point_to_json(p));
    os << dump_json(rows) << "\n";
}

void write_simulation(const std::vector<SimulationRow>& rows, OutputFormat format,
                      std::ostream& os) {
    if (format == OutputFormat::Csv) {
        os << "n,b_n,theta,sigma,mean_theta_hat,sd_theta_hat,ks\n";
        for (const auto& r : rows) {
            os << r.n << ',' << csv::format_double(r.b_n) << ','
               << csv::format_double(r.theta_n) << ',' << csv::format_double(r.sigma_n)
               << ',' << csv::format_double(r.mean_theta_hat) << ','
               << csv::format_double(r.sd_theta_hat) << ','
               << csv::format_double(r.ks) << "\n";
        }
        return;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        json row = json::object();
        row["n"] = r.n;
        row["b_n"] = r.b_n;
        row["theta"] = r.theta_n;
        row["sigma"] = r.sigma_n;
        row["mean_theta_hat"] = r.mean_theta_hat;
        row["sd_theta_hat"] = r.sd_theta_hat;
        row["ks"] = r.ks;
        arr.push_back(row);
    }
    os << dump_json(arr) << "\n";
}

}  // namespace

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "structured-text" || name == "json") return OutputFormat::StructuredText;
    throw std::runtime_error("unknown output format '" + name +
                             "' (expected csv or structured-text)");
}

int cmd_estimate(const EstimateOptions& opt, const CommonOptions& common,
                 std::ostream& out, std::ostream& err) {
    try {
        const auto rows = csv::read_counts_file(opt.counts_path);
        std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
        raw.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            raw.emplace_back(i + 1, rows[i].count);
        }
        const EmpiricalSample sample = EmpiricalSample::from_counts(std::move(raw));
        const IndexFamily family(opt.alpha, opt.gamma, parse_transform(opt.transform));
        if (!(opt.level > 0.0 && opt.level < 1.0)) {
            throw std::runtime_error("confidence level must lie in (0,1)");
        }

        EstimateReport report;
        report.theta_hat = plugin_theta(sample, family);
        report.sigma_hat_sq = plugin_sigma_sq(sample, family);
        report.n = sample.n;
        const bool degenerate = !(report.sigma_hat_sq > 0.0);
        if (!degenerate) {
            report.ci = confidence_interval(sample, family, opt.level);
        }

        const OutputFormat format = common.format.value_or(OutputFormat::StructuredText);
        const int io = with_output(common, out, err, [&](std::ostream& os) {
            if (format == OutputFormat::Csv) {
                os << "theta_hat,sigma_hat_sq,n,ci_lower,ci_upper,level\n";
                os << csv::format_double(report.theta_hat) << ','
                   << csv::format_double(report.sigma_hat_sq) << ',' << report.n << ',';
                if (report.ci) {
                    os << csv::format_double(report.ci->lower) << ','
                       << csv::format_double(report.ci->upper) << ','
                       << csv::format_double(report.ci->level);
                } else {
                    os << ",,";
                }
                os << "\n";
            } else {
                json obj = json::object();
                obj["theta_hat"] = report.theta_hat;
                obj["sigma_hat_sq"] = report.sigma_hat_sq;
                obj["n"] = report.n;
                if (report.ci) {
                    obj["ci_lower"] = report.ci->lower;
                    obj["ci_upper"] = report.ci->upper;
                    obj["level"] = report.ci->level;
                }
                os << dump_json(obj) << "\n";
            }
        });
        if (io != 0) return io;
        if (degenerate) {
            err << "degenerate variance: normal asymptotics fail for this sample\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_catalog(const std::vector<double>& alphas, const std::vector<double>& gammas,
                const CommonOptions& common, std::ostream& out, std::ostream& err) {
    try {
        if (alphas.empty() || gammas.empty()) {
            throw std::runtime_error("catalog needs nonempty alpha and gamma grids");
        }
        return with_output(common, out, err, [&](std::ostream& os) {
            os << "alpha,gamma,beta,K,M\n";
            for (double a : alphas) {
                for (double g : gammas) {
                    os << csv::format_double(a) << ',' << csv::format_double(g) << ',';
                    bool classified = false;
                    try {
                        const IndexFamily family(a, g);
                        if (family.classification_domain()) {
                            const HolderClass hc = holder_class(family);
                            os << csv::format_double(hc.beta) << ','
                               << csv::format_double(hc.K) << ','
                               << csv::format_double(hc.M) << "\n";
                            classified = true;
                        }
                    } catch (const std::invalid_argument&) {
                    }
                    if (!classified) os << "unclassified,unclassified,unclassified\n";
                }
            }
        });
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_validate(const std::string& config_path, const CommonOptions& common,
                 std::ostream& out, std::ostream& err) {
    try {
        const ParsedExperiment parsed =
            parse_experiment(config_path, Command::Validate, common);
        const MdpContext ctx =
            MdpContext::make(parsed.family, parsed.dists, parsed.scale, parsed.tol);
        const ScaleValidationReport report = validate_scale(ctx, parsed.n_grid);
        echo_resolved(parsed, err);
        const int io = with_output(common, out, err, [&](std::ostream& os) {
            os << "n,b_n,sigma_n,ratio\n";
            for (const auto& row : report.rows) {
                os << row.n << ',' << csv::format_double(row.b_n) << ','
                   << csv::format_double(row.sigma_n) << ','
                   << csv::format_double(row.ratio) << "\n";
            }
        });
        if (io != 0) return io;
        if (!report.ok) {
            err << "moderate deviation scale invalid: "
                << scale_condition_text(ctx.beta);
            if (!report.failing_n.empty()) {
                err << "; failing n:";
                for (std::uint64_t n : report.failing_n) err << ' ' << n;
            }
            err << "\n";
            return 1;
        }
        err << "scale ok; worst ratio " << csv::format_double(report.worst_ratio)
            << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

namespace {

int run_experiment_command(const std::string& config_path, const CommonOptions& common,
                           std::ostream& out, std::ostream& err, Command cmd) {
    std::optional<ParsedExperiment> parsed;
    try {
        parsed = parse_experiment(config_path, cmd, common);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        ExperimentConfig cfg{parsed->dists,      parsed->family, parsed->n_grid,
                             parsed->replicates, parsed->r_grid, parsed->scale,
                             parsed->master_seed, parsed->tol,   common.threads};
        echo_resolved(*parsed, err);
        const OutputFormat format = common.format.value_or(OutputFormat::Csv);
        if (cmd == Command::Rate) {
            const RateCurve curve = run_experiment(cfg);
            return with_output(common, out, err, [&](std::ostream& os) {
                write_rate_curve(curve, format, os);
            });
        }
        const auto rows = run_simulation(cfg);
        return with_output(common, out, err, [&](std::ostream& os) {
            write_simulation(rows, format, os);
        });
    } catch (const std::invalid_argument& e) {
        // scale/domain rejections surface as exit 1 with the condition named
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int cmd_simulate(const std::string& config_path, const CommonOptions& common,
                 std::ostream& out, std::ostream& err) {
    return run_experiment_command(config_path, common, out, err, Command::Simulate);
}

int cmd_rate(const std::string& config_path, const CommonOptions& common,
             std::ostream& out, std::ostream& err) {
    return run_experiment_command(config_path, common, out, err, Command::Rate);
}

}  // namespace divmdp::cli
