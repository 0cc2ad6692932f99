#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "poisson_lab/contour.hpp"
#include "poisson_lab/montecarlo.hpp"
#include "poisson_lab/saddle.hpp"
#include "poisson_lab/series.hpp"
#include "poisson_lab/zeros.hpp"

namespace plab::io {

inline constexpr const char* kVersion = "0.1.0";

/// 16 hex digits of FNV-1a over the compact JSON dump.
std::string config_hash(const nlohmann::json& config);

/// "# {json}" line: the resolved config plus the artifact version.
void write_header(std::ostream& os, const nlohmann::json& config);
/// Parses a header line written by write_header.
nlohmann::json read_header(const std::string& line);

/// index,sign,log10_abs rows (%.17g) after the header.
void write_coefficients_csv(std::ostream& os, const CoefficientTable& c, const nlohmann::json& config);

struct CoefficientRow {
  int index = 0;
  int sign = 0;
  double log10_abs = 0.0;
};
struct CoefficientCsv {
  nlohmann::json header;
  std::vector<CoefficientRow> rows;
};
CoefficientCsv read_coefficients_csv(std::istream& is);

/// One JSON object per Newton iterate.
void write_saddle_trace(std::ostream& os, const SaddlePoint& sp, const nlohmann::json& config);

/// k,r,arc,log10_abs,arg,nodes rows.
void write_contour_csv(std::ostream& os, const ContourResult& res, const nlohmann::json& config);

/// seed,k,index,zero,gap rows; gap is empty on the first zero.
void write_zeros_csv(std::ostream& os, const ZeroSet& zs, std::uint64_t seed,
                     const nlohmann::json& config);
/// seed,k,index,fractional_part rows.
void write_fractional_csv(std::ostream& os, const SpacingReport& sr, int k, std::uint64_t seed,
                          const nlohmann::json& config);

/// Header line, then one ReplicaSummary per line.
void write_replicas_jsonl(std::ostream& os, const std::vector<ReplicaSummary>& summaries,
                          const nlohmann::json& config);

std::string format_double(double x);

}  // namespace plab::io
