#include "bannerforge/weight_calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "bannerforge/csv.hpp"
#include "bannerforge/error.hpp"

namespace bannerforge {

EnergyWeights weights_from_coefficients(const std::array<double, 4>& beta, double floor) {
  std::array<double, 4> raw{};
  for (std::size_t i = 0; i < 4; ++i) raw[i] = std::max(-beta[i], 0.0);
  if (std::all_of(raw.begin(), raw.end(), [](double r) { return r == 0.0; })) return {floor, floor, floor, floor};

  // Solve mean(max(s * raw_i, floor)) == 1 for the scale s. The left side is
  // increasing in s, so walk the candidate counts of unfloored weights.
  std::array<double, 4> sorted = raw;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double n = 4.0;
  double scale = 0.0;
  double top_sum = 0.0;
  for (std::size_t k = 1; k <= 4 && sorted[k - 1] > 0.0; ++k) {
    top_sum += sorted[k - 1];
    const double s = (n - (n - static_cast<double>(k)) * floor) / top_sum;
    const bool kth_above = s * sorted[k - 1] >= floor;
    const bool next_below = k == 4 || s * sorted[k] <= floor;
    if (kth_above && next_below) {
      scale = s;
      break;
    }
  }
  auto w = [&](std::size_t i) { return std::max(scale * raw[i], floor); };
  return {w(0), w(1), w(2), w(3)};
}

CalibrationResult fit_weights(std::span<const HistoricalBannerRecord> records) {
  const std::size_t n = records.size();
  if (n < kMinCalibrationRecords) {
    throw DataError("records", "need at least " + std::to_string(kMinCalibrationRecords) + " records, got " +
                                   std::to_string(n));
  }
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = records[r].terms();
    const bool finite = std::all_of(t.begin(), t.end(), [](double v) { return std::isfinite(v); }) &&
                        std::isfinite(records[r].ctr);
    if (!finite) throw DataError("records[" + std::to_string(r) + "]", "non-finite value");
  }

  // Standardize each term column (population standard deviation).
  std::array<double, 4> mean{};
  std::array<double, 4> sd{};
  for (const auto& rec : records) {
    const auto t = rec.terms();
    for (std::size_t j = 0; j < 4; ++j) mean[j] += t[j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (const auto& rec : records) {
    const auto t = rec.terms();
    for (std::size_t j = 0; j < 4; ++j) sd[j] += (t[j] - mean[j]) * (t[j] - mean[j]);
  }
  static constexpr const char* kNames[] = {"e_align", "e_overlap", "e_dist", "e_sym"};
  for (std::size_t j = 0; j < 4; ++j) {
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
    if (!(sd[j] > 1e-12 * std::max(1.0, std::abs(mean[j])))) {
      throw DataError(kNames[j], "term column is constant; design matrix is rank deficient");
    }
  }

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 5);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = records[r].terms();
    const auto row = static_cast<Eigen::Index>(r);
    x(row, 0) = 1.0;
    for (std::size_t j = 0; j < 4; ++j) x(row, static_cast<Eigen::Index>(j + 1)) = (t[j] - mean[j]) / sd[j];
    y(row) = records[r].ctr;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 5) throw DataError("records", "design matrix is rank deficient");
  const Eigen::VectorXd coef = qr.solve(y);

  CalibrationResult out;
  out.n_records = n;
  out.intercept = coef(0);
  for (std::size_t j = 0; j < 4; ++j) out.coefficients[j] = coef(static_cast<Eigen::Index>(j + 1));

  const double y_mean = y.mean();
  const double ss_tot = (y.array() - y_mean).square().sum();
  const double ss_res = (y - x * coef).squaredNorm();
  if ((y.array() == y(0)).all() || ss_tot <= 0.0) {
    out.coefficients = {0.0, 0.0, 0.0, 0.0};
    out.r_squared = 0.0;
  } else {
    out.r_squared = 1.0 - ss_res / ss_tot;
  }
  out.weights = weights_from_coefficients(out.coefficients);
  return out;
}

std::vector<HistoricalBannerRecord> parse_records_csv(std::string_view text) {
  const CsvTable table = parse_csv(text);
  const std::size_t c_id = table.column("banner_id");
  const std::size_t cols[] = {table.column("e_align"), table.column("e_overlap"), table.column("e_dist"),
                              table.column("e_sym"), table.column("ctr")};
  static constexpr std::string_view kNames[] = {"e_align", "e_overlap", "e_dist", "e_sym", "ctr"};
  std::vector<HistoricalBannerRecord> out;
  out.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    double v[5];
    for (std::size_t j = 0; j < 5; ++j) v[j] = parse_csv_number(row[cols[j]], r + 2, kNames[j]);
    out.push_back({row[c_id], v[0], v[1], v[2], v[3], v[4]});
  }
  return out;
}

std::string records_to_csv(std::span<const HistoricalBannerRecord> records) {
  std::ostringstream os;
  os << "banner_id,e_align,e_overlap,e_dist,e_sym,ctr\n";
  for (const auto& r : records) {
    os << r.banner_id << ',' << format_number(r.e_align) << ',' << format_number(r.e_overlap) << ','
       << format_number(r.e_dist) << ',' << format_number(r.e_sym) << ',' << format_number(r.ctr) << '\n';
  }
  return os.str();
}

}  // namespace bannerforge
