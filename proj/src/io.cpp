#include "poisson_lab/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "poisson_lab/errors.hpp"

namespace plab::io {

using nlohmann::json;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_header(std::ostream& os, const json& config) {
  os << "# " << json{{"version", kVersion}, {"config", config}}.dump() << '\n';
}

json read_header(const std::string& line) {
  if (line.rfind("# ", 0) != 0) throw InvalidParameter("missing header line");
  return json::parse(line.substr(2));
}

void write_coefficients_csv(std::ostream& os, const CoefficientTable& c, const json& config) {
  json cfg = config;
  cfg["seed"] = c.seed;
  cfg["window_halfwidth"] = c.window_halfwidth;
  cfg["bits"] = c.precision.bits;
  cfg["n_points"] = c.n_points;
  write_header(os, cfg);
  os << "index,sign,log10_abs\n";
  for (std::size_t j = 0; j < c.e.size(); ++j) {
    const int sg = c.e[j].sign();
    const double l10 = sg == 0 ? -INFINITY : c.e[j].log_abs() / std::log(10.0);
    os << j << ',' << sg << ',' << format_double(l10) << '\n';
  }
}

CoefficientCsv read_coefficients_csv(std::istream& is) {
  CoefficientCsv out;
  std::string line;
  if (!std::getline(is, line)) throw InvalidParameter("empty coefficient file");
  out.header = read_header(line);
  if (!std::getline(is, line) || line != "index,sign,log10_abs")
    throw InvalidParameter("bad coefficient column header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    CoefficientRow row;
    std::string field;
    std::getline(ls, field, ',');
    row.index = std::stoi(field);
    std::getline(ls, field, ',');
    row.sign = std::stoi(field);
    std::getline(ls, field, ',');
    row.log10_abs = field == "-inf" ? -INFINITY : std::stod(field);
    out.rows.push_back(row);
  }
  return out;
}

void write_saddle_trace(std::ostream& os, const SaddlePoint& sp, const json& config) {
  write_header(os, config);
  for (std::size_t i = 0; i < sp.trace.size(); ++i) {
    json j{{"iteration", i}, {"re", sp.trace[i].real()}, {"im", sp.trace[i].imag()}};
    if (i < sp.residual_trace.size()) j["residual"] = sp.residual_trace[i];
    os << j.dump() << '\n';
  }
}

void write_contour_csv(std::ostream& os, const ContourResult& res, const json& config) {
  write_header(os, config);
  os << "k,r,arc,log10_abs,arg,nodes\n";
  for (Arc a : kAllArcs) {
    const ArcIntegral& ai = res.arc(a);
    os << res.k << ',' << res.r << ',' << arc_label(a) << ',' << format_double(ai.value.log10_abs())
       << ',' << format_double(ai.value.arg) << ',' << ai.nodes << '\n';
  }
  os << res.k << ',' << res.r << ",total," << format_double(res.total.log10_abs()) << ','
     << format_double(res.total.arg) << ",0\n";
}

void write_zeros_csv(std::ostream& os, const ZeroSet& zs, std::uint64_t seed, const json& config) {
  write_header(os, config);
  os << "seed,k,index,zero,gap\n";
  for (std::size_t i = 0; i < zs.zeros.size(); ++i) {
    os << seed << ',' << zs.k << ',' << i << ',' << format_double(zs.zeros[i]) << ',';
    if (i > 0) os << format_double(zs.zeros[i] - zs.zeros[i - 1]);
    os << '\n';
  }
}

void write_fractional_csv(std::ostream& os, const SpacingReport& sr, int k, std::uint64_t seed,
                          const json& config) {
  write_header(os, config);
  os << "seed,k,index,fractional_part\n";
  for (std::size_t i = 0; i < sr.fractional_parts.size(); ++i)
    os << seed << ',' << k << ',' << i << ',' << format_double(sr.fractional_parts[i]) << '\n';
}

void write_replicas_jsonl(std::ostream& os, const std::vector<ReplicaSummary>& summaries,
                          const json& config) {
  write_header(os, config);
  for (const auto& s : summaries) os << s.to_json().dump() << '\n';
}

}  // namespace plab::io
