#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace demsim {

inline constexpr const char* demsim_version = "0.1.0";

// Least-squares fit with per-coefficient standard errors. model is
// "fourier" (y = A + B sin 2x + C cos 4x, coeff = {A, B, C}) or
// "powerlaw" (y = a x^p, coeff = {a, p}, fitted in log-log space).
struct fit_result {
    std::string model;
    std::vector<double> coeff;
    std::vector<double> std_err;
    double residual_norm = 0.0;
};

fit_result fit_fourier(const std::vector<double>& x, const std::vector<double>& y);
fit_result fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Deterministic number formatting shared by every CSV emitter.
std::string format_double(double v);

// CSV with '#'-prefixed metadata lines, then a header row, then data rows.
class csv_writer {
public:
    explicit csv_writer(std::ostream& os) : os_(os) {}
    void metadata(const std::string& key, const std::string& value);
    void metadata(const std::string& key, double value);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);

private:
    std::ostream& os_;
    std::size_t n_columns_ = 0;
};

// Reader for the same format: metadata lines are skipped, the first
// non-metadata row names the columns.
struct csv_table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const;
};

csv_table read_csv(const std::string& path);

// "a:b:s" (inclusive range with step s), "a:b" (step 1), or "a,b,c".
std::vector<int> parse_int_list(const std::string& text);

// Full command-line entry point; returns the process exit code
// (0 success, 1 runtime failure, 2 usage error).
int cli_dispatch(int argc, char** argv);

}  // namespace demsim
