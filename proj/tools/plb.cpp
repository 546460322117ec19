// plb: train small classifiers, attack them with the proximal log-barrier
// method, and summarize campaign results.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "plb/attack.hpp"
#include "plb/campaign.hpp"
#include "plb/dataset.hpp"
#include "plb/network.hpp"
#include "plb/pnm.hpp"
#include "plb/tensor.hpp"

namespace {

std::vector<std::string> split(const std::string& text, char delim) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == delim) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  std::size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

int parse_int(const std::string& what, const std::string& text) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": not an integer: '" + text + "'");
  }
}

std::uint64_t parse_u64(const std::string& what, const std::string& text) {
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": not an unsigned integer: '" + text +
                             "'");
  }
}

double parse_double(const std::string& what, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(what + ": not a number: '" + text + "'");
  }
}

bool parse_bool(const std::string& what, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "0" || text == "false" || text == "no" || text == "off") {
    return false;
  }
  throw std::runtime_error(what + ": not a boolean: '" + text + "'");
}

// Line-oriented key=value file; '#' starts a comment, blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::runtime_error("config: line " + std::to_string(line_no) +
                               ": expected key=value");
    }
    pairs.emplace_back(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
  }
  return pairs;
}

using Setters =
    std::map<std::string, std::function<void(const std::string&)>>;

// Applies config values for options the command line left unset; command-line
// flags win, unknown keys are errors. `given` ends up holding every key that
// was set explicitly by either source.
void merge_config(const CLI::App* cmd, const std::string& config_path,
                  const Setters& setters, std::set<std::string>* given) {
  for (const auto& [key, setter] : setters) {
    if (cmd->count("--" + key) > 0) given->insert(key);
  }
  if (config_path.empty()) return;
  for (const auto& [key, value] : read_config_file(config_path)) {
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::runtime_error("config: unknown key '" + key + "'");
    }
    if (cmd->count("--" + key) > 0) continue;
    it->second(value);
    given->insert(key);
  }
}

void require_set(const std::set<std::string>& given, const char* key) {
  if (given.count(key) == 0) {
    throw std::runtime_error(std::string("missing --") + key +
                             " (flag or config key)");
  }
}

// --data accepts either "idx:<images>:<labels>" or
// "blobs:classes=3,per_class=200,dim=16,noise=0.08,seed=7" (keys optional,
// shape=CxHxW as an alternative to dim).
plb::Dataset load_data(const std::string& spec) {
  if (spec.rfind("idx:", 0) == 0) {
    const std::vector<std::string> parts = split(spec.substr(4), ':');
    if (parts.size() != 2 || parts[0].empty() || parts[1].empty()) {
      throw std::runtime_error(
          "data spec: expected idx:<images_path>:<labels_path>");
    }
    return plb::load_idx(parts[0], parts[1]);
  }
  if (spec.rfind("blobs:", 0) == 0) {
    int classes = 3;
    int per_class = 200;
    double noise = 0.08;
    std::uint64_t seed = 7;
    plb::Shape shape{1, 1, 16};
    for (const std::string& token : split(spec.substr(6), ',')) {
      if (token.empty()) continue;
      const std::size_t eq = token.find('=');
      if (eq == std::string::npos) {
        throw std::runtime_error("blobs spec: expected key=value, got '" +
                                 token + "'");
      }
      const std::string key = token.substr(0, eq);
      const std::string val = token.substr(eq + 1);
      if (key == "classes") {
        classes = parse_int("blobs classes", val);
      } else if (key == "per_class") {
        per_class = parse_int("blobs per_class", val);
      } else if (key == "noise" || key == "sigma") {
        noise = parse_double("blobs noise", val);
      } else if (key == "seed") {
        seed = parse_u64("blobs seed", val);
      } else if (key == "dim") {
        shape = {1, 1, parse_int("blobs dim", val)};
      } else if (key == "shape") {
        const std::vector<std::string> dims = split(val, 'x');
        if (dims.size() != 3) {
          throw std::runtime_error("blobs shape: expected CxHxW");
        }
        shape = {parse_int("blobs shape", dims[0]),
                 parse_int("blobs shape", dims[1]),
                 parse_int("blobs shape", dims[2])};
      } else {
        throw std::runtime_error("blobs spec: unknown key '" + key + "'");
      }
    }
    return plb::generate_blobs(shape, classes, per_class, noise, seed);
  }
  throw std::runtime_error(
      "data spec must start with 'idx:' or 'blobs:', got '" + spec + "'");
}

std::vector<int> parse_dims(const std::string& what, const std::string& text) {
  std::vector<int> dims;
  for (const std::string& part : split(text, '-')) {
    if (part.empty()) continue;
    dims.push_back(parse_int(what, part));
  }
  return dims;
}

// "8c3s2" = 8 output channels, 3x3 kernel, stride 2 (stride defaults to 1).
plb::ConvSpec parse_conv_block(const std::string& block) {
  const std::size_t c = block.find('c');
  if (c == std::string::npos || c == 0) {
    throw std::runtime_error("conv block: expected <out>c<kernel>[s<stride>], "
                             "got '" + block + "'");
  }
  plb::ConvSpec conv;
  conv.out_channels = parse_int("conv out channels", block.substr(0, c));
  std::string rest = block.substr(c + 1);
  const std::size_t s = rest.find('s');
  if (s != std::string::npos) {
    conv.stride = parse_int("conv stride", rest.substr(s + 1));
    rest = rest.substr(0, s);
  }
  conv.kernel = parse_int("conv kernel", rest);
  return conv;
}

// --arch accepts "linear", "mlp:<d1-d2-...>", or "cnn:<blocks>[:<fc dims>]".
plb::Network build_arch(const std::string& spec, const plb::Shape& input,
                        int classes, std::uint64_t seed) {
  if (spec == "linear") return plb::make_mlp(input, {}, classes, seed);
  if (spec == "mlp" || spec.rfind("mlp:", 0) == 0) {
    const std::string dims = spec.size() > 4 ? spec.substr(4) : "";
    return plb::make_mlp(input, parse_dims("mlp dims", dims), classes, seed);
  }
  if (spec.rfind("cnn:", 0) == 0) {
    const std::vector<std::string> parts = split(spec.substr(4), ':');
    if (parts.empty() || parts.size() > 2 || parts[0].empty()) {
      throw std::runtime_error("cnn spec: expected cnn:<blocks>[:<fc dims>]");
    }
    std::vector<plb::ConvSpec> convs;
    for (const std::string& block : split(parts[0], '-')) {
      if (!block.empty()) convs.push_back(parse_conv_block(block));
    }
    const std::vector<int> hidden =
        parts.size() == 2 ? parse_dims("cnn fc dims", parts[1])
                          : std::vector<int>{};
    return plb::make_cnn(input, convs, hidden, classes, seed);
  }
  throw std::runtime_error(
      "unknown architecture '" + spec +
      "' (expected linear, mlp:<dims>, or cnn:<blocks>[:<fc dims>])");
}

plb::InitNoise parse_init_noise(const std::string& name) {
  if (name == "auto") return plb::InitNoise::Auto;
  if (name == "gaussian") return plb::InitNoise::Gaussian;
  if (name == "uniform") return plb::InitNoise::Uniform;
  throw std::runtime_error("init-noise must be auto, gaussian, or uniform");
}

std::map<plb::Metric, std::vector<double>> default_thresholds(
    const std::vector<plb::CampaignRecord>& records) {
  std::map<plb::Metric, std::vector<double>> thresholds;
  for (const plb::CampaignRecord& rec : records) {
    if (rec.metric == plb::Metric::L0) {
      thresholds[plb::Metric::L0] = {10.0, 30.0};
      break;
    }
  }
  return thresholds;
}

void save_campaign_images(const std::string& dir, const plb::Dataset& data,
                          const std::vector<plb::CampaignRecord>& records) {
  const int channels = data.shape.channels;
  if (channels != 1 && channels != 3) {
    std::fprintf(stderr,
                 "note: %d-channel images have no PGM/PPM form; skipping "
                 "--save-images\n",
                 channels);
    return;
  }
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string ext = channels == 3 ? ".ppm" : ".pgm";
  std::set<int> clean_written;
  for (const plb::CampaignRecord& rec : records) {
    const std::string stem = std::to_string(rec.image_id);
    if (clean_written.insert(rec.image_id).second) {
      const plb::Image& clean =
          data.examples[static_cast<std::size_t>(rec.image_id)].image;
      plb::write_pnm(clean, (fs::path(dir) / (stem + "_clean" + ext)).string());
    }
    if (rec.success && rec.adversarial.has_value()) {
      const std::string name = stem + "_" + plb::metric_name(rec.metric) + ext;
      plb::write_pnm(*rec.adversarial, (fs::path(dir) / name).string());
    }
  }
}

struct TrainArgs {
  std::string data;
  std::string arch;
  std::string out;
  std::string config_path;
  plb::TrainConfig config;
  double holdout = 0.1;
  std::uint64_t seed = 0;
};

void run_train(const CLI::App* cmd, TrainArgs& args) {
  Setters setters;
  setters["data"] = [&](const std::string& v) { args.data = v; };
  setters["arch"] = [&](const std::string& v) { args.arch = v; };
  setters["out"] = [&](const std::string& v) { args.out = v; };
  setters["epochs"] = [&](const std::string& v) {
    args.config.epochs = parse_int("epochs", v);
  };
  setters["batch"] = [&](const std::string& v) {
    args.config.batch_size = parse_int("batch", v);
  };
  setters["lr"] = [&](const std::string& v) {
    args.config.learning_rate = parse_double("lr", v);
  };
  setters["holdout"] = [&](const std::string& v) {
    args.holdout = parse_double("holdout", v);
  };
  setters["seed"] = [&](const std::string& v) {
    args.seed = parse_u64("seed", v);
  };
  std::set<std::string> given;
  merge_config(cmd, args.config_path, setters, &given);
  require_set(given, "data");
  require_set(given, "arch");
  require_set(given, "out");
  if (args.holdout < 0 || args.holdout >= 1) {
    throw std::runtime_error("holdout must lie in [0, 1)");
  }
  if (args.config.epochs < 1 || args.config.batch_size < 1) {
    throw std::runtime_error("epochs and batch must be positive");
  }

  plb::Dataset data = load_data(args.data);
  const std::size_t holdout_n = static_cast<std::size_t>(
      args.holdout * static_cast<double>(data.examples.size()));
  const std::size_t train_n = data.examples.size() - holdout_n;
  std::vector<plb::LabeledExample> train_set(data.examples.begin(),
                                             data.examples.begin() + train_n);
  std::vector<plb::LabeledExample> holdout_set(
      data.examples.begin() + train_n, data.examples.end());

  plb::Network net =
      build_arch(args.arch, data.shape, data.class_count, args.seed);
  plb::TrainConfig cfg = args.config;
  cfg.seed = args.seed;
  const plb::TrainReport report = plb::train(net, train_set, holdout_set, cfg);

  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    std::printf("epoch %zu loss %.6f\n", e + 1, report.epoch_loss[e]);
  }
  std::printf("train accuracy %.4f (%zu examples)\n", report.train_accuracy,
              train_n);
  if (holdout_n > 0) {
    std::printf("holdout accuracy %.4f (%zu examples)\n",
                report.holdout_accuracy, holdout_n);
  }
  plb::save_weights(net, args.out);
  std::printf("wrote %s\n", args.out.c_str());
}

struct AttackArgs {
  std::string weights;
  std::string data;
  std::string metric = "l2";
  double lambda0 = 0, beta = 0, step = 0, mu = 0;
  int iters = 0, inner = 0, topk = 0, init_tries = 0, restarts = 0;
  bool softmax = false, l0_via_l1 = false;
  std::string init_noise = "auto";
  int sample = 100;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
  std::string save_images;
  std::string config_path;
};

void run_attack(const CLI::App* cmd, AttackArgs& args) {
  Setters setters;
  setters["weights"] = [&](const std::string& v) { args.weights = v; };
  setters["data"] = [&](const std::string& v) { args.data = v; };
  setters["metric"] = [&](const std::string& v) { args.metric = v; };
  setters["lambda0"] = [&](const std::string& v) {
    args.lambda0 = parse_double("lambda0", v);
  };
  setters["beta"] = [&](const std::string& v) {
    args.beta = parse_double("beta", v);
  };
  setters["step"] = [&](const std::string& v) {
    args.step = parse_double("step", v);
  };
  setters["mu"] = [&](const std::string& v) {
    args.mu = parse_double("mu", v);
  };
  setters["iters"] = [&](const std::string& v) {
    args.iters = parse_int("iters", v);
  };
  setters["inner"] = [&](const std::string& v) {
    args.inner = parse_int("inner", v);
  };
  setters["topk"] = [&](const std::string& v) {
    args.topk = parse_int("topk", v);
  };
  setters["softmax"] = [&](const std::string& v) {
    args.softmax = parse_bool("softmax", v);
  };
  setters["l0-via-l1"] = [&](const std::string& v) {
    args.l0_via_l1 = parse_bool("l0-via-l1", v);
  };
  setters["init-noise"] = [&](const std::string& v) { args.init_noise = v; };
  setters["init-tries"] = [&](const std::string& v) {
    args.init_tries = parse_int("init-tries", v);
  };
  setters["restarts"] = [&](const std::string& v) {
    args.restarts = parse_int("restarts", v);
  };
  setters["sample"] = [&](const std::string& v) {
    args.sample = parse_int("sample", v);
  };
  setters["seed"] = [&](const std::string& v) {
    args.seed = parse_u64("seed", v);
  };
  setters["threads"] = [&](const std::string& v) {
    args.threads = parse_int("threads", v);
  };
  setters["out"] = [&](const std::string& v) { args.out = v; };
  setters["save-images"] = [&](const std::string& v) { args.save_images = v; };
  std::set<std::string> given;
  merge_config(cmd, args.config_path, setters, &given);
  require_set(given, "weights");
  require_set(given, "data");
  require_set(given, "out");

  const std::optional<plb::Metric> metric = plb::metric_from_name(args.metric);
  if (!metric.has_value()) {
    throw std::runtime_error("unknown metric '" + args.metric +
                             "' (expected l0, l1, l2, linf, or tv)");
  }
  plb::AttackConfig acfg = plb::AttackConfig::defaults_for(*metric);
  if (given.count("lambda0")) acfg.lambda0 = args.lambda0;
  if (given.count("beta")) acfg.beta = args.beta;
  if (given.count("step")) acfg.step = args.step;
  if (given.count("mu")) acfg.mu = args.mu;
  if (given.count("iters")) acfg.iterations = args.iters;
  if (given.count("inner")) acfg.inner_iterations = args.inner;
  if (given.count("topk")) acfg.k_top = args.topk;
  if (given.count("init-tries")) acfg.max_init_tries = args.init_tries;
  if (given.count("restarts")) acfg.restarts = args.restarts;
  acfg.use_softmax = args.softmax;
  acfg.l0_via_l1 = args.l0_via_l1;
  acfg.init_noise = parse_init_noise(args.init_noise);

  const plb::Network net = plb::load_weights(args.weights);
  const plb::Dataset data = load_data(args.data);
  plb::CampaignConfig ccfg;
  ccfg.metrics = {*metric};
  if (args.sample < 1) throw std::runtime_error("sample must be positive");
  if (args.threads < 1) throw std::runtime_error("threads must be positive");
  ccfg.sample_count =
      std::min<int>(args.sample, static_cast<int>(data.examples.size()));
  if (ccfg.sample_count < args.sample) {
    std::fprintf(stderr, "note: dataset has %zu examples; sampling all\n",
                 data.examples.size());
  }
  ccfg.seed = args.seed;
  ccfg.threads = args.threads;
  ccfg.attack = acfg;
  ccfg.keep_images = !args.save_images.empty();

  const std::vector<plb::CampaignRecord> records =
      plb::run_campaign(net, data, ccfg);
  plb::write_csv(records, args.out);
  if (!args.save_images.empty()) {
    save_campaign_images(args.save_images, data, records);
  }
  std::printf("wrote %s (%zu records)\n", args.out.c_str(), records.size());
  std::fputs(plb::format_summary(plb::summarize(records), records,
                                 default_thresholds(records))
                 .c_str(),
             stdout);
}

struct ReportArgs {
  std::string results;
  std::string thresholds_text;
  std::string config_path;
};

void run_report(const CLI::App* cmd, ReportArgs& args) {
  Setters setters;
  setters["results"] = [&](const std::string& v) { args.results = v; };
  setters["thresholds"] = [&](const std::string& v) {
    args.thresholds_text = v;
  };
  std::set<std::string> given;
  merge_config(cmd, args.config_path, setters, &given);
  require_set(given, "results");

  const std::vector<plb::CampaignRecord> records =
      plb::read_csv_file(args.results);
  std::map<plb::Metric, std::vector<double>> thresholds;
  if (args.thresholds_text.empty()) {
    thresholds = default_thresholds(records);
  } else {
    std::vector<double> eps;
    for (const std::string& part : split(args.thresholds_text, ',')) {
      if (!part.empty()) eps.push_back(parse_double("thresholds", part));
    }
    std::set<plb::Metric> present;
    for (const plb::CampaignRecord& r : records) present.insert(r.metric);
    for (plb::Metric m : present) thresholds[m] = eps;
  }
  std::fputs(plb::format_summary(plb::summarize(records), records, thresholds)
                 .c_str(),
             stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximal log-barrier adversarial attack toolkit"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train a classifier, write PLBW weights");
  train_cmd->add_option("--data", train_args.data,
                        "idx:<images>:<labels> or blobs:key=val,...");
  train_cmd->add_option("--arch", train_args.arch,
                        "linear | mlp:<dims> | cnn:<blocks>[:<fc dims>]");
  train_cmd->add_option("--epochs", train_args.config.epochs, "SGD epochs");
  train_cmd->add_option("--batch", train_args.config.batch_size,
                        "minibatch size");
  train_cmd->add_option("--lr", train_args.config.learning_rate,
                        "learning rate");
  train_cmd->add_option("--holdout", train_args.holdout,
                        "fraction of examples held out for accuracy");
  train_cmd->add_option("--seed", train_args.seed,
                        "seed for init and shuffling");
  train_cmd->add_option("--out", train_args.out, "output weights path");
  train_cmd->add_option("--config", train_args.config_path,
                        "key=value file (keys are the long option names); "
                        "command-line flags win, unknown keys are errors");
  train_cmd->callback([&train_args, train_cmd] {
    run_train(train_cmd, train_args);
  });

  AttackArgs attack_args;
  CLI::App* attack_cmd = app.add_subcommand(
      "attack", "Attack sampled images, write per-image CSV");
  attack_cmd->add_option("--weights", attack_args.weights,
                         "PLBW weights file");
  attack_cmd->add_option("--data", attack_args.data,
                         "idx:<images>:<labels> or blobs:key=val,...");
  attack_cmd
      ->add_option("--metric", attack_args.metric,
                   "dissimilarity metric to minimize")
      ->check(CLI::IsMember({"l0", "l1", "l2", "linf", "tv"}));
  attack_cmd->add_option("--lambda0", attack_args.lambda0,
                         "initial barrier weight");
  attack_cmd->add_option("--beta", attack_args.beta,
                         "barrier decay per block");
  attack_cmd->add_option("--step", attack_args.step, "gradient step size h");
  attack_cmd->add_option("--mu", attack_args.mu, "proximal weight");
  attack_cmd->add_option("--iters", attack_args.iters, "outer iterations K");
  attack_cmd->add_option("--inner", attack_args.inner,
                         "block length K_inner");
  attack_cmd->add_option("--topk", attack_args.topk,
                         "barrier targets the k-th best rival class");
  attack_cmd->add_flag("--softmax", attack_args.softmax,
                       "evaluate the barrier on softmax outputs");
  attack_cmd->add_flag("--l0-via-l1", attack_args.l0_via_l1,
                       "optimize with the l1 prox while scoring l0");
  attack_cmd
      ->add_option("--init-noise", attack_args.init_noise,
                   "starting-point noise: auto, gaussian, uniform")
      ->check(CLI::IsMember({"auto", "gaussian", "uniform"}));
  attack_cmd->add_option("--restarts", attack_args.restarts,
                         "independent initializations, best run wins");
  attack_cmd->add_option("--init-tries", attack_args.init_tries,
                         "initialization draws per noise level");
  attack_cmd->add_option("--sample", attack_args.sample,
                         "images sampled from the dataset");
  attack_cmd->add_option("--seed", attack_args.seed, "campaign seed");
  attack_cmd->add_option("--threads", attack_args.threads, "worker threads");
  attack_cmd->add_option("--out", attack_args.out, "output CSV path");
  attack_cmd->add_option("--save-images", attack_args.save_images,
                         "directory for clean/adversarial PGM or PPM dumps");
  attack_cmd->add_option("--config", attack_args.config_path,
                         "key=value file (keys are the long option names); "
                         "command-line flags win, unknown keys are errors");
  attack_cmd->callback([&attack_args, attack_cmd] {
    run_attack(attack_cmd, attack_args);
  });

  ReportArgs report_args;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Summarize an attack CSV");
  report_cmd->add_option("--results", report_args.results,
                         "CSV from `plb attack`");
  report_cmd->add_option("--thresholds", report_args.thresholds_text,
                         "comma-separated epsilons for error-at-epsilon rows");
  report_cmd->add_option("--config", report_args.config_path,
                         "key=value file (keys are the long option names); "
                         "command-line flags win, unknown keys are errors");
  report_cmd->callback([&report_args, report_cmd] {
    run_report(report_cmd, report_args);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
