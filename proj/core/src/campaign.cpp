#include "plb/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace plb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

int metric_rank(Metric m) {
  for (int i = 0; i < static_cast<int>(std::size(kAllMetrics)); ++i) {
    if (kAllMetrics[i] == m) return i;
  }
  return -1;
}

// Seeds depend only on the campaign seed and the (image, metric) pair, so
// results do not change with the worker count.
std::uint64_t derive_seed(std::uint64_t base, int image_id, Metric metric) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(image_id) + 1));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(metric_rank(metric)) + 1));
  return h;
}

double metric_component(const Distances& d, Metric m) {
  switch (m) {
    case Metric::L0: return d.l0;
    case Metric::L1: return d.l1;
    case Metric::L2: return d.l2;
    case Metric::Linf: return d.linf;
    case Metric::TV: return d.tv;
  }
  throw std::invalid_argument("metric_component: unknown metric");
}

}  // namespace

std::vector<CampaignRecord> run_campaign(const Network& net,
                                         const Dataset& data,
                                         const CampaignConfig& cfg) {
  if (cfg.metrics.empty()) {
    throw std::invalid_argument("run_campaign: no metrics requested");
  }
  if (cfg.sample_count < 1 || cfg.threads < 1) {
    throw std::invalid_argument("run_campaign: bad sample or thread count");
  }
  if (data.examples.empty()) {
    throw std::invalid_argument("run_campaign: empty dataset");
  }

  const std::vector<int> ids = sample_indices(
      static_cast<int>(data.examples.size()), cfg.sample_count, cfg.seed);

  struct Job {
    int image_id;
    Metric metric;
  };
  std::vector<Job> jobs;
  jobs.reserve(ids.size() * cfg.metrics.size());
  for (int id : ids) {
    for (Metric m : cfg.metrics) jobs.push_back({id, m});
  }

  std::vector<CampaignRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      try {
        const Job& job = jobs[j];
        const LabeledExample& ex =
            data.examples[static_cast<std::size_t>(job.image_id)];
        CampaignRecord rec;
        rec.image_id = job.image_id;
        rec.true_label = ex.label;
        rec.clean_pred = predict(net, ex.image);
        rec.metric = job.metric;
        rec.seed = derive_seed(cfg.seed, job.image_id, job.metric);
        AttackConfig acfg = cfg.attack;
        acfg.metric = job.metric;
        acfg.seed = rec.seed;
        AttackResult r = prox_log_barrier_attack(net, ex.image, ex.label, acfg);
        rec.success = r.success;
        rec.distances = r.distances;
        rec.iterations = r.iterations;
        rec.backtracks = r.backtracks;
        if (cfg.keep_images) rec.adversarial = std::move(r.adversarial);
        records[j] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(jobs.size());
        return;
      }
    }
  };

  const int thread_count =
      std::min<int>(cfg.threads, static_cast<int>(jobs.size()));
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::stable_sort(records.begin(), records.end(),
                   [](const CampaignRecord& a, const CampaignRecord& b) {
                     if (a.image_id != b.image_id) return a.image_id < b.image_id;
                     return metric_rank(a.metric) < metric_rank(b.metric);
                   });
  return records;
}

std::vector<MetricSummary> summarize(const std::vector<CampaignRecord>& records) {
  std::vector<MetricSummary> out;
  for (Metric m : kAllMetrics) {
    int attempted = 0;
    int succeeded = 0;
    int clean_correct = 0;
    double iter_sum = 0;
    std::vector<double> dists;
    for (const CampaignRecord& rec : records) {
      if (rec.metric != m) continue;
      ++attempted;
      if (rec.clean_pred == rec.true_label) ++clean_correct;
      iter_sum += rec.iterations;
      dists.push_back(rec.success
                          ? metric_component(rec.distances, m)
                          : std::numeric_limits<double>::infinity());
      if (rec.success) ++succeeded;
    }
    if (attempted == 0) continue;

    MetricSummary s;
    s.metric = m;
    s.attempted = attempted;
    s.succeeded = succeeded;
    s.success_rate = static_cast<double>(succeeded) / attempted;
    s.clean_accuracy = static_cast<double>(clean_correct) / attempted;
    s.mean_iterations = iter_sum / attempted;
    if (s.success_rate > 0.5) {
      std::sort(dists.begin(), dists.end());
      const std::size_t n = dists.size();
      const double median = (n % 2 == 1)
                                ? dists[n / 2]
                                : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
      s.median_distance = median;
      s.median_is_lower_bound = succeeded < attempted;
    }
    out.push_back(std::move(s));
  }
  return out;
}

double error_at_epsilon(const std::vector<CampaignRecord>& records,
                        Metric metric, double epsilon) {
  int total = 0;
  int errors = 0;
  for (const CampaignRecord& rec : records) {
    if (rec.metric != metric) continue;
    ++total;
    if (rec.clean_pred != rec.true_label) {
      ++errors;
    } else if (rec.success &&
               metric_component(rec.distances, metric) <= epsilon) {
      ++errors;
    }
  }
  return total > 0 ? static_cast<double>(errors) / total : 0.0;
}

std::string format_summary(const std::vector<MetricSummary>& summaries,
                           const std::vector<CampaignRecord>& records,
                           const std::map<Metric, std::vector<double>>& thresholds) {
  std::ostringstream out;
  out << "# error_at_epsilon counts images the clean model already "
         "misclassifies at every epsilon\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-6s %9s %9s %12s %11s %16s %10s\n",
                "metric", "attempted", "succeeded", "success_rate",
                "clean_acc", "median_distance", "mean_iter");
  out << line;
  for (const MetricSummary& s : summaries) {
    std::string median = "-";
    if (s.median_distance.has_value()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6g", *s.median_distance);
      median = buf;
      if (s.median_is_lower_bound) median += "*";
    }
    std::snprintf(line, sizeof(line),
                  "%-6s %9d %9d %12.3f %11.3f %16s %10.1f\n",
                  metric_name(s.metric).c_str(), s.attempted, s.succeeded,
                  s.success_rate, s.clean_accuracy, median.c_str(),
                  s.mean_iterations);
    out << line;
  }
  for (const auto& [metric, eps_list] : thresholds) {
    for (double eps : eps_list) {
      std::snprintf(line, sizeof(line),
                    "error_at_epsilon metric=%s eps=%g rate=%.4f\n",
                    metric_name(metric).c_str(), eps,
                    error_at_epsilon(records, metric, eps));
      out << line;
    }
  }
  return out.str();
}

namespace {

constexpr char kCsvHeader[] =
    "image_id,true_label,clean_pred,metric,success,distance_l0,distance_l1,"
    "distance_l2,distance_linf,distance_tv,iterations,backtracks,seed";

std::vector<std::string> split_fields(const std::string& text) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void csv_error(std::size_t line_no, const std::string& msg) {
  throw std::runtime_error("read_csv: line " + std::to_string(line_no) + ": " +
                           msg);
}

}  // namespace

void write_csv(const std::vector<CampaignRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  char line[512];
  for (const CampaignRecord& rec : records) {
    std::snprintf(line, sizeof(line),
                  "%d,%d,%d,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%" PRIu64
                  "\n",
                  rec.image_id, rec.true_label, rec.clean_pred,
                  metric_name(rec.metric).c_str(), rec.success ? 1 : 0,
                  rec.distances.l0, rec.distances.l1, rec.distances.l2,
                  rec.distances.linf, rec.distances.tv, rec.iterations,
                  rec.backtracks, static_cast<std::uint64_t>(rec.seed));
    out << line;
  }
}

void write_csv(const std::vector<CampaignRecord>& records,
               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  write_csv(records, out);
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

std::vector<CampaignRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("read_csv: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw std::runtime_error("read_csv: unexpected header: " + line);
  }

  std::vector<CampaignRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 13) csv_error(line_no, "expected 13 fields");
    try {
      CampaignRecord rec;
      rec.image_id = std::stoi(f[0]);
      rec.true_label = std::stoi(f[1]);
      rec.clean_pred = std::stoi(f[2]);
      const std::optional<Metric> m = metric_from_name(f[3]);
      if (!m.has_value()) csv_error(line_no, "unknown metric " + f[3]);
      rec.metric = *m;
      rec.success = std::stoi(f[4]) != 0;
      rec.distances.l0 = std::stod(f[5]);
      rec.distances.l1 = std::stod(f[6]);
      rec.distances.l2 = std::stod(f[7]);
      rec.distances.linf = std::stod(f[8]);
      rec.distances.tv = std::stod(f[9]);
      rec.iterations = std::stoi(f[10]);
      rec.backtracks = std::stoi(f[11]);
      rec.seed = std::stoull(f[12]);
      records.push_back(std::move(rec));
    } catch (const std::invalid_argument&) {
      csv_error(line_no, "malformed number");
    } catch (const std::out_of_range&) {
      csv_error(line_no, "number out of range");
    }
  }
  return records;
}

std::vector<CampaignRecord> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  return read_csv(in);
}

}  // namespace plb
