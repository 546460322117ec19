#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plb/attack.hpp"
#include "plb/dataset.hpp"
#include "plb/network.hpp"
#include "plb/tensor.hpp"

namespace plb {

struct CampaignConfig {
  std::vector<Metric> metrics = {Metric::L2};
  int sample_count = 100;      // images drawn from the dataset
  std::uint64_t seed = 0;      // drives sampling and per-image attack seeds
  int threads = 1;
  AttackConfig attack;         // metric/seed fields are overridden per run
  bool keep_images = false;    // retain adversarial images in the records
};

struct CampaignRecord {
  int image_id = 0;            // index into the source dataset
  int true_label = 0;
  int clean_pred = 0;
  Metric metric = Metric::L2;
  bool success = false;
  Distances distances;
  int iterations = 0;
  int backtracks = 0;
  std::uint64_t seed = 0;      // per-image attack seed actually used
  std::optional<Image> adversarial;  // present when keep_images
};

// Runs the attack over a deterministic sample of the dataset, one record per
// (image, metric). Images the model already misclassifies succeed trivially
// with distance zero. Output is sorted by (image_id, metric) and is
// independent of thread count.
std::vector<CampaignRecord> run_campaign(const Network& net,
                                         const Dataset& data,
                                         const CampaignConfig& cfg);

struct MetricSummary {
  Metric metric = Metric::L2;
  int attempted = 0;           // sampled images attacked under this metric
  int succeeded = 0;
  double success_rate = 0;     // succeeded / attempted
  double clean_accuracy = 0;   // fraction the clean model got right
  std::optional<double> median_distance;  // absent when success_rate <= 1/2
  bool median_is_lower_bound = false;     // success_rate in (1/2, 1): failures
                                          // enter the median as +infinity
  double mean_iterations = 0;
};

std::vector<MetricSummary> summarize(const std::vector<CampaignRecord>& records);

// Fraction of sampled images misclassified at perturbation size <= epsilon
// under the given metric. Clean misclassifications count at every epsilon;
// failed attacks never count.
double error_at_epsilon(const std::vector<CampaignRecord>& records,
                        Metric metric, double epsilon);

// One row per (metric, epsilon) threshold plus the summary block.
std::string format_summary(const std::vector<MetricSummary>& summaries,
                           const std::vector<CampaignRecord>& records,
                           const std::map<Metric, std::vector<double>>& thresholds);

// CSV schema:
// image_id,true_label,clean_pred,metric,success,distance_l0,distance_l1,
// distance_l2,distance_linf,distance_tv,iterations,backtracks,seed
// Doubles print with %.17g so a round-trip is exact.
void write_csv(const std::vector<CampaignRecord>& records, std::ostream& out);
void write_csv(const std::vector<CampaignRecord>& records,
               const std::string& path);
std::vector<CampaignRecord> read_csv(std::istream& in);
std::vector<CampaignRecord> read_csv_file(const std::string& path);

}  // namespace plb
