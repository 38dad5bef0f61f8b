#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "negmem/covariance.hpp"
#include "negmem/moments.hpp"
#include "negmem/montecarlo.hpp"
#include "negmem/paths.hpp"

namespace negmem {

// One-column numeric text file, lag order 0, 1, 2, ...; '#' starts a comment.
CovarianceModel load_covariance_file(const std::filesystem::path& file,
                                     bool compactly_supported);

nlohmann::ordered_json to_json(const AssumptionReport& report);
nlohmann::ordered_json to_json(const BoundsCertificate& cert);
nlohmann::ordered_json to_json(const ProfitTerms& terms);
nlohmann::ordered_json to_json(const SpectrumDiagnostic& diag);
nlohmann::ordered_json to_json(const GrowthReport& report);
nlohmann::ordered_json to_json(const LambdaSweep& sweep);

std::string growth_csv(const GrowthReport& report);
std::string lambda_sweep_csv(const LambdaSweep& sweep);
std::string ledger_csv(std::span<const double> prices, const LedgerReport& ledger,
                       const MarketParams& params);
std::string variance_ratio_csv(const SecondOrderTable& table, double hurst);
std::string rho_grid_csv(const SecondOrderTable& table);

// Binary columnar batch: one JSON header line, then raw little-endian
// doubles (all increments rows, then all price rows).
void write_path_batch(const PathBatch& batch, const CovarianceModel& model,
                      const std::filesystem::path& file);
PathBatch read_path_batch(const std::filesystem::path& file);

// One row per (path, t); intended for small batches.
std::string path_batch_csv(const PathBatch& batch);

void write_text_file(const std::filesystem::path& file, const std::string& content);

}  // namespace negmem
