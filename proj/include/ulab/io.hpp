#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ulab/checks.hpp"
#include "ulab/convergence.hpp"
#include "ulab/estimators.hpp"
#include "ulab/pathspace.hpp"
#include "ulab/rates.hpp"

namespace ulab {

/// %.17g, with "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// A JSON number, or the format_double string when not finite.
nlohmann::json json_number(double v);

/// Header t,x0,...,x{d-1} then one row per grid point.
void write_path_csv(std::ostream& out, const DiscretePath& path);
/// Reads a path CSV; the grid is t_0 = 0 ... t_n = T and must be uniform.
DiscretePath read_path_csv(std::istream& in);
DiscretePath read_path_csv(const std::filesystem::path& file);

inline constexpr const char* kEstimateHeader = "eps,x,phat,ci_lo,ci_hi,log_value,zero_hit,ess,n,seed";
std::string estimate_csv_row(const LogProbEstimate& est);

nlohmann::json to_json(const LogProbEstimate& est);
nlohmann::json to_json(const LaplaceEstimate& est);
nlohmann::json to_json(const IndexSetSample& a);
nlohmann::json to_json(const CheckReport& report);
nlohmann::json to_json(const ConvergenceTable& table);
nlohmann::json to_json(const MomentReport& report);
nlohmann::json to_json(const std::vector<WeakContinuityRow>& rows);

/// One row per cell: definition,bound,eps,x,extra,gap,terms.
void write_report_csv(std::ostream& out, const CheckReport& report);
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);

/// path_000.csv ... plus manifest.json {x, s, count, seed, rates[]}.
void export_level_set(const std::filesystem::path& dir, const LevelSetSample& sample);

/// Writes @p text to @p file, or to stdout when file is empty or "-".
void write_text(const std::string& file, const std::string& text);

}  // namespace ulab
