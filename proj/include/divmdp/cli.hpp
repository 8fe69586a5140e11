#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace divmdp::cli {

enum class OutputFormat { Csv, StructuredText };

// "csv", "structured-text" (alias "json"); throws on anything else.
OutputFormat parse_format(const std::string& name);

struct CommonOptions {
    std::optional<std::uint64_t> seed;   // overrides the config master_seed
    std::string out_path;                // empty = write to the provided stream
    std::optional<OutputFormat> format;  // default depends on the command
    unsigned threads = 1;
};

struct EstimateOptions {
    std::string counts_path;
    double alpha = 2.0;
    double gamma = 0.0;
    std::string transform = "none";
    double level = 0.95;
};

// Exit codes: 0 success; 1 statistical failure (degenerate variance,
// invalid moderate-deviation scale); 2 input or configuration error.
// Result data goes to --out (or `out`); diagnostics and the resolved-config
// echo go to `err`.
int cmd_estimate(const EstimateOptions& opt, const CommonOptions& common,
                 std::ostream& out, std::ostream& err);
int cmd_catalog(const std::vector<double>& alphas, const std::vector<double>& gammas,
                const CommonOptions& common, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& config_path, const CommonOptions& common,
                 std::ostream& out, std::ostream& err);
int cmd_simulate(const std::string& config_path, const CommonOptions& common,
                 std::ostream& out, std::ostream& err);
int cmd_rate(const std::string& config_path, const CommonOptions& common,
             std::ostream& out, std::ostream& err);

}  // namespace divmdp::cli
