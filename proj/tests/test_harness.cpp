#include "plb/campaign.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "plb/dataset.hpp"
#include "plb/network.hpp"
#include "plb/pnm.hpp"
#include "plb/tensor.hpp"

namespace {

namespace fs = std::filesystem;
using plb::CampaignConfig;
using plb::CampaignRecord;
using plb::Dataset;
using plb::Image;
using plb::Metric;
using plb::Shape;

void put_u32_be(std::ostream& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

void write_idx_fixture(const fs::path& images, const fs::path& labels,
                       std::uint32_t image_count, std::uint32_t label_count,
                       std::size_t pixel_bytes) {
  std::ofstream img(images, std::ios::binary);
  put_u32_be(img, 0x00000803);
  put_u32_be(img, image_count);
  put_u32_be(img, 2);  // rows
  put_u32_be(img, 3);  // cols
  const unsigned char pixels[] = {0, 51, 102, 153, 204, 255,
                                  10, 20, 30, 40, 50, 60};
  img.write(reinterpret_cast<const char*>(pixels),
            static_cast<std::streamsize>(pixel_bytes));
  img.close();
  std::ofstream lab(labels, std::ios::binary);
  put_u32_be(lab, 0x00000801);
  put_u32_be(lab, label_count);
  const unsigned char marks[] = {7, 1};
  lab.write(reinterpret_cast<const char*>(marks),
            static_cast<std::streamsize>(label_count));
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

CampaignRecord make_record(int image_id, Metric metric, bool success,
                           double distance, int clean_pred, int true_label,
                           int iterations = 10) {
  CampaignRecord rec;
  rec.image_id = image_id;
  rec.true_label = true_label;
  rec.clean_pred = clean_pred;
  rec.metric = metric;
  rec.success = success;
  rec.distances.l0 = distance;
  rec.distances.l1 = distance;
  rec.distances.l2 = distance;
  rec.distances.linf = distance;
  rec.distances.tv = distance;
  rec.iterations = iterations;
  rec.backtracks = 2;
  rec.seed = 42;
  return rec;
}

TEST(LoadIdx, ReadsTheFixtureAndScalesPixels) {
  const fs::path images = temp_file("plb-idx-images");
  const fs::path labels = temp_file("plb-idx-labels");
  write_idx_fixture(images, labels, 2, 2, 12);
  const Dataset data = plb::load_idx(images.string(), labels.string());
  ASSERT_EQ(data.examples.size(), 2u);
  EXPECT_EQ(data.shape.channels, 1);
  EXPECT_EQ(data.shape.height, 2);
  EXPECT_EQ(data.shape.width, 3);
  EXPECT_DOUBLE_EQ(data.examples[0].image[0], 0.0);
  EXPECT_DOUBLE_EQ(data.examples[0].image[1], 51.0 / 255.0);
  EXPECT_DOUBLE_EQ(data.examples[0].image[5], 1.0);
  EXPECT_EQ(data.examples[0].label, 7);
  EXPECT_EQ(data.examples[1].label, 1);
  EXPECT_EQ(data.class_count, 8);  // max label + 1
  fs::remove(images);
  fs::remove(labels);
}

TEST(LoadIdx, RejectsBadMagicCountsAndTruncation) {
  const fs::path images = temp_file("plb-idx-images2");
  const fs::path labels = temp_file("plb-idx-labels2");

  write_idx_fixture(images, labels, 2, 2, 12);
  // Labels file used as the image file: wrong magic.
  EXPECT_THROW(plb::load_idx(labels.string(), labels.string()),
               std::runtime_error);
  EXPECT_THROW(plb::load_idx(images.string(), "/nonexistent/labels"),
               std::runtime_error);

  write_idx_fixture(images, labels, 2, 1, 12);  // count mismatch
  EXPECT_THROW(plb::load_idx(images.string(), labels.string()),
               std::runtime_error);

  write_idx_fixture(images, labels, 2, 2, 7);  // image payload cut short
  EXPECT_THROW(plb::load_idx(images.string(), labels.string()),
               std::runtime_error);
  fs::remove(images);
  fs::remove(labels);
}

TEST(SaveIdx, RoundTripsWithinQuantization) {
  const Dataset data = plb::generate_blobs(Shape{1, 3, 3}, 3, 4, 0.1, 17);
  const fs::path images = temp_file("plb-idx-rt-images");
  const fs::path labels = temp_file("plb-idx-rt-labels");
  plb::save_idx(data, images.string(), labels.string());
  const Dataset back = plb::load_idx(images.string(), labels.string());
  ASSERT_EQ(back.examples.size(), data.examples.size());
  for (std::size_t n = 0; n < data.examples.size(); ++n) {
    EXPECT_EQ(back.examples[n].label, data.examples[n].label);
    for (int i = 0; i < data.shape.count(); ++i) {
      EXPECT_NEAR(back.examples[n].image[i], data.examples[n].image[i],
                  0.5 / 255.0 + 1e-12);
    }
  }
  fs::remove(images);
  fs::remove(labels);

  Dataset rgb;
  rgb.shape = Shape{3, 2, 2};
  rgb.examples.push_back({Image(rgb.shape, 0.5), 0});
  EXPECT_THROW(plb::save_idx(rgb, images.string(), labels.string()),
               std::invalid_argument);
}

TEST(GenerateBlobs, DeterministicSeparatedAndInsideTheBox) {
  const Dataset a = plb::generate_blobs(Shape{1, 2, 2}, 3, 5, 0.05, 23);
  const Dataset b = plb::generate_blobs(Shape{1, 2, 2}, 3, 5, 0.05, 23);
  ASSERT_EQ(a.examples.size(), 15u);
  EXPECT_EQ(a.class_count, 3);
  for (std::size_t n = 0; n < a.examples.size(); ++n) {
    EXPECT_EQ(a.examples[n].label, b.examples[n].label);
    for (int i = 0; i < 4; ++i) {
      EXPECT_DOUBLE_EQ(a.examples[n].image[i], b.examples[n].image[i]);
      EXPECT_GE(a.examples[n].image[i], 0.0);
      EXPECT_LE(a.examples[n].image[i], 1.0);
    }
  }

  // Zero noise collapses each class onto its center pattern.
  const Dataset pure = plb::generate_blobs(Shape{1, 1, 4}, 2, 3, 0.0, 29);
  const auto& first0 = pure.examples[0];
  const auto& first1 = pure.examples[1];
  for (const auto& ex : pure.examples) {
    const auto& center = ex.label == 0 ? first0.image : first1.image;
    for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(ex.image[i], center[i]);
  }
  double center_gap = 0;
  for (int i = 0; i < 4; ++i) {
    center_gap += std::abs(first0.image[i] - first1.image[i]);
  }
  EXPECT_GT(center_gap, 0.1);

  EXPECT_THROW(plb::generate_blobs(Shape{1, 1, 4}, 1, 3, 0.1, 1),
               std::invalid_argument);
  EXPECT_THROW(plb::generate_blobs(Shape{1, 1, 4}, 2, 0, 0.1, 1),
               std::invalid_argument);
  EXPECT_THROW(plb::generate_blobs(Shape{1, 1, 4}, 2, 3, -0.1, 1),
               std::invalid_argument);
}

TEST(SampleIndices, DeterministicSortedWithoutReplacement) {
  const std::vector<int> a = plb::sample_indices(100, 20, 3);
  const std::vector<int> b = plb::sample_indices(100, 20, 3);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a[i - 1], a[i]);
  EXPECT_GE(a.front(), 0);
  EXPECT_LT(a.back(), 100);

  const std::vector<int> different = plb::sample_indices(100, 20, 4);
  EXPECT_NE(a, different);

  const std::vector<int> all = plb::sample_indices(5, 9, 3);
  EXPECT_EQ(all, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(plb::sample_indices(5, 0, 3).empty());
  EXPECT_THROW(plb::sample_indices(-1, 3, 0), std::invalid_argument);
  EXPECT_THROW(plb::sample_indices(5, -2, 0), std::invalid_argument);
}

class CampaignFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new Dataset(plb::generate_blobs(Shape{1, 4, 4}, 3, 10, 0.12, 41));
    net_ = new plb::Network(plb::make_mlp(data_->shape, {12}, 3, 6));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete net_;
    data_ = nullptr;
    net_ = nullptr;
  }
  static CampaignConfig base_config() {
    CampaignConfig cfg;
    cfg.metrics = {Metric::L2, Metric::Linf};
    cfg.sample_count = 12;
    cfg.seed = 7;
    cfg.attack.iterations = 40;
    cfg.attack.inner_iterations = 10;
    return cfg;
  }
  static Dataset* data_;
  static plb::Network* net_;
};

Dataset* CampaignFixture::data_ = nullptr;
plb::Network* CampaignFixture::net_ = nullptr;

TEST_F(CampaignFixture, ProducesOneSortedRecordPerImageAndMetric) {
  CampaignConfig cfg = base_config();
  const std::vector<CampaignRecord> records = plb::run_campaign(*net_, *data_, cfg);
  ASSERT_EQ(records.size(), 24u);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const bool ordered =
        records[i - 1].image_id < records[i].image_id ||
        (records[i - 1].image_id == records[i].image_id &&
         records[i - 1].metric == Metric::L2 && records[i].metric == Metric::Linf);
    EXPECT_TRUE(ordered) << "position " << i;
  }
  // The untrained model misclassifies most inputs; those attacks succeed
  // trivially at distance zero without running the loop.
  int trivial = 0;
  for (const CampaignRecord& rec : records) {
    if (rec.clean_pred != rec.true_label) {
      ++trivial;
      EXPECT_TRUE(rec.success);
      EXPECT_EQ(rec.iterations, 0);
      EXPECT_DOUBLE_EQ(rec.distances.l2, 0.0);
    }
  }
  EXPECT_GT(trivial, 0);
}

TEST_F(CampaignFixture, DeterministicAcrossRunsAndThreadCounts) {
  CampaignConfig cfg = base_config();
  std::ostringstream once, again, parallel;
  plb::write_csv(plb::run_campaign(*net_, *data_, cfg), once);
  plb::write_csv(plb::run_campaign(*net_, *data_, cfg), again);
  cfg.threads = 4;
  plb::write_csv(plb::run_campaign(*net_, *data_, cfg), parallel);
  EXPECT_EQ(once.str(), again.str());
  EXPECT_EQ(once.str(), parallel.str());
}

TEST_F(CampaignFixture, KeptImagesReproduceTheReportedDistances) {
  CampaignConfig cfg = base_config();
  cfg.keep_images = true;
  cfg.sample_count = 6;
  const std::vector<CampaignRecord> records = plb::run_campaign(*net_, *data_, cfg);
  for (const CampaignRecord& rec : records) {
    ASSERT_TRUE(rec.adversarial.has_value());
    const Image& original =
        data_->examples[static_cast<std::size_t>(rec.image_id)].image;
    const plb::Distances d = plb::measure_distances(*rec.adversarial, original);
    EXPECT_DOUBLE_EQ(rec.distances.l0, d.l0);
    EXPECT_DOUBLE_EQ(rec.distances.l1, d.l1);
    EXPECT_DOUBLE_EQ(rec.distances.l2, d.l2);
    EXPECT_DOUBLE_EQ(rec.distances.linf, d.linf);
    EXPECT_DOUBLE_EQ(rec.distances.tv, d.tv);
    if (rec.success) {
      EXPECT_NE(plb::predict(*net_, *rec.adversarial), rec.true_label);
    }
  }
}

TEST_F(CampaignFixture, SummaryCountsEverySampledImage) {
  CampaignConfig cfg = base_config();
  const std::vector<CampaignRecord> records = plb::run_campaign(*net_, *data_, cfg);
  const std::vector<plb::MetricSummary> summaries = plb::summarize(records);
  ASSERT_EQ(summaries.size(), 2u);
  for (const plb::MetricSummary& s : summaries) {
    EXPECT_EQ(s.attempted, 12);
    EXPECT_LE(s.succeeded, s.attempted);
    EXPECT_DOUBLE_EQ(s.success_rate,
                     static_cast<double>(s.succeeded) / s.attempted);
    EXPECT_GE(s.clean_accuracy, 0.0);
    EXPECT_LE(s.clean_accuracy, 1.0);
  }
}

TEST_F(CampaignFixture, ValidatesItsConfiguration) {
  CampaignConfig cfg = base_config();
  cfg.metrics = {};
  EXPECT_THROW(plb::run_campaign(*net_, *data_, cfg), std::invalid_argument);
  cfg = base_config();
  cfg.sample_count = 0;
  EXPECT_THROW(plb::run_campaign(*net_, *data_, cfg), std::invalid_argument);
  cfg = base_config();
  cfg.threads = 0;
  EXPECT_THROW(plb::run_campaign(*net_, *data_, cfg), std::invalid_argument);
  cfg = base_config();
  const Dataset empty;
  EXPECT_THROW(plb::run_campaign(*net_, empty, cfg), std::invalid_argument);
}

TEST(Summarize, MedianFollowsTheLowerBoundConvention) {
  std::vector<CampaignRecord> records;
  // l2: three successes and one failure; failures enter as +infinity so the
  // reported median is only a lower bound.
  records.push_back(make_record(0, Metric::L2, true, 0.1, 0, 0));
  records.push_back(make_record(1, Metric::L2, true, 0.2, 1, 1));
  records.push_back(make_record(2, Metric::L2, true, 0.3, 0, 1));
  records.push_back(make_record(3, Metric::L2, false, 0.0, 1, 1, 40));
  // l1: clean sweep, odd count.
  records.push_back(make_record(0, Metric::L1, true, 0.5, 0, 0));
  records.push_back(make_record(1, Metric::L1, true, 0.1, 0, 0));
  records.push_back(make_record(2, Metric::L1, true, 0.3, 0, 0));
  // linf: succeeds on fewer than half the images.
  records.push_back(make_record(0, Metric::Linf, true, 0.4, 0, 0));
  records.push_back(make_record(1, Metric::Linf, true, 0.2, 0, 0));
  records.push_back(make_record(2, Metric::Linf, false, 0.0, 0, 0));
  records.push_back(make_record(3, Metric::Linf, false, 0.0, 0, 0));
  records.push_back(make_record(4, Metric::Linf, false, 0.0, 0, 0));

  // summarize reports in canonical metric order: l1, l2, linf here.
  const std::vector<plb::MetricSummary> summaries = plb::summarize(records);
  ASSERT_EQ(summaries.size(), 3u);

  const plb::MetricSummary& l1 = summaries[0];
  EXPECT_EQ(l1.metric, Metric::L1);
  EXPECT_EQ(l1.attempted, 3);
  EXPECT_DOUBLE_EQ(l1.success_rate, 1.0);
  ASSERT_TRUE(l1.median_distance.has_value());
  EXPECT_DOUBLE_EQ(*l1.median_distance, 0.3);
  EXPECT_FALSE(l1.median_is_lower_bound);
  EXPECT_DOUBLE_EQ(l1.clean_accuracy, 1.0);

  const plb::MetricSummary& l2 = summaries[1];
  EXPECT_EQ(l2.metric, Metric::L2);
  EXPECT_EQ(l2.attempted, 4);
  EXPECT_EQ(l2.succeeded, 3);
  ASSERT_TRUE(l2.median_distance.has_value());
  EXPECT_DOUBLE_EQ(*l2.median_distance, 0.25);  // midpoint of 0.2 and 0.3
  EXPECT_TRUE(l2.median_is_lower_bound);
  // Records 0, 1, and 3 have clean_pred == true_label.
  EXPECT_DOUBLE_EQ(l2.clean_accuracy, 0.75);

  const plb::MetricSummary& linf = summaries.back();
  EXPECT_EQ(linf.metric, Metric::Linf);
  EXPECT_DOUBLE_EQ(linf.success_rate, 0.4);
  EXPECT_FALSE(linf.median_distance.has_value());
}

TEST(ErrorAtEpsilon, MonotoneAndCleanFailuresAlwaysCount) {
  std::vector<CampaignRecord> records;
  records.push_back(make_record(0, Metric::L2, true, 0.0, 1, 0));  // clean miss
  records.push_back(make_record(1, Metric::L2, true, 0.2, 0, 0));
  records.push_back(make_record(2, Metric::L2, true, 0.4, 1, 1));
  records.push_back(make_record(3, Metric::L2, false, 0.0, 2, 2));

  EXPECT_DOUBLE_EQ(plb::error_at_epsilon(records, Metric::L2, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(plb::error_at_epsilon(records, Metric::L2, 0.2), 0.5);
  EXPECT_DOUBLE_EQ(plb::error_at_epsilon(records, Metric::L2, 0.3), 0.5);
  EXPECT_DOUBLE_EQ(plb::error_at_epsilon(records, Metric::L2, 0.45), 0.75);
  // The failed attack never counts, no matter how large epsilon grows.
  EXPECT_DOUBLE_EQ(plb::error_at_epsilon(records, Metric::L2, 1e9), 0.75);
  EXPECT_DOUBLE_EQ(plb::error_at_epsilon(records, Metric::L1, 0.5), 0.0);

  double prev = 0;
  for (double eps = 0.0; eps <= 1.0; eps += 0.05) {
    const double rate = plb::error_at_epsilon(records, Metric::L2, eps);
    EXPECT_GE(rate, prev);
    prev = rate;
  }

  std::vector<CampaignRecord> uniform;
  for (int i = 0; i < 4; ++i) {
    uniform.push_back(make_record(i, Metric::Linf, true, 0.2, 0, 0));
  }
  EXPECT_DOUBLE_EQ(plb::error_at_epsilon(uniform, Metric::Linf, 0.3), 1.0);
}

TEST(FormatSummary, ShowsTheConventionsInText) {
  std::vector<CampaignRecord> records;
  records.push_back(make_record(0, Metric::L2, true, 0.1, 0, 0));
  records.push_back(make_record(1, Metric::L2, true, 0.3, 0, 0));
  records.push_back(make_record(2, Metric::L2, false, 0.0, 0, 0));
  records.push_back(make_record(0, Metric::Linf, true, 0.2, 0, 0));
  records.push_back(make_record(1, Metric::Linf, false, 0.0, 0, 0));
  const auto summaries = plb::summarize(records);
  const std::string text = plb::format_summary(
      summaries, records, {{Metric::L2, {0.25, 1.0}}});
  EXPECT_NE(text.find("# error_at_epsilon counts"), std::string::npos);
  EXPECT_NE(text.find("metric"), std::string::npos);
  EXPECT_NE(text.find("clean_acc"), std::string::npos);
  // l2 succeeded on 2 of 3: its median carries the lower-bound marker.
  EXPECT_NE(text.find("0.3*"), std::string::npos);
  // linf is at half: no median at all.
  EXPECT_NE(text.find("-"), std::string::npos);
  EXPECT_NE(text.find("error_at_epsilon metric=l2 eps=0.25"), std::string::npos);
  EXPECT_NE(text.find("error_at_epsilon metric=l2 eps=1"), std::string::npos);
}

TEST(Csv, RoundTripIsExact) {
  std::vector<CampaignRecord> records;
  CampaignRecord rec = make_record(3, Metric::TV, true, 0.0, 2, 1, 200);
  rec.distances.l0 = 17.0;
  rec.distances.l1 = 1.0 / 3.0;
  rec.distances.l2 = 0.1;
  rec.distances.linf = 1e-17;
  rec.distances.tv = 123.456789012345678;
  rec.seed = 0xDEADBEEFDEADBEEFull;
  records.push_back(rec);
  records.push_back(make_record(5, Metric::L0, false, 0.0, 0, 0, 900));

  std::ostringstream out;
  plb::write_csv(records, out);
  std::istringstream in(out.str());
  const std::vector<CampaignRecord> back = plb::read_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].image_id, 3);
  EXPECT_EQ(back[0].true_label, 1);
  EXPECT_EQ(back[0].clean_pred, 2);
  EXPECT_EQ(back[0].metric, Metric::TV);
  EXPECT_TRUE(back[0].success);
  EXPECT_EQ(back[0].distances.l0, records[0].distances.l0);
  EXPECT_EQ(back[0].distances.l1, records[0].distances.l1);
  EXPECT_EQ(back[0].distances.l2, records[0].distances.l2);
  EXPECT_EQ(back[0].distances.linf, records[0].distances.linf);
  EXPECT_EQ(back[0].distances.tv, records[0].distances.tv);
  EXPECT_EQ(back[0].iterations, 200);
  EXPECT_EQ(back[0].backtracks, 2);
  EXPECT_EQ(back[0].seed, records[0].seed);
  EXPECT_EQ(back[1].metric, Metric::L0);
  EXPECT_FALSE(back[1].success);

  // File variant round trip.
  const fs::path path = temp_file("plb-records.csv");
  plb::write_csv(records, path.string());
  const std::vector<CampaignRecord> from_file = plb::read_csv_file(path.string());
  EXPECT_EQ(from_file.size(), 2u);
  fs::remove(path);
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream bad_header("not,a,header\n");
  EXPECT_THROW(plb::read_csv(bad_header), std::runtime_error);

  std::istringstream empty("");
  EXPECT_THROW(plb::read_csv(empty), std::runtime_error);

  const std::string header =
      "image_id,true_label,clean_pred,metric,success,distance_l0,distance_l1,"
      "distance_l2,distance_linf,distance_tv,iterations,backtracks,seed";
  std::istringstream short_line(header + "\n1,2,3\n");
  try {
    plb::read_csv(short_line);
    FAIL() << "expected runtime_error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }

  std::istringstream bad_metric(header +
                                "\n1,0,0,l7,1,0,0,0,0,0,10,0,99\n");
  EXPECT_THROW(plb::read_csv(bad_metric), std::runtime_error);

  std::istringstream bad_number(header +
                                "\n1,0,0,l2,1,zero,0,0,0,0,10,0,99\n");
  EXPECT_THROW(plb::read_csv(bad_number), std::runtime_error);
}

TEST(WritePnm, ProducesExactPgmBytes) {
  const fs::path path = temp_file("plb-zeros.pgm");
  plb::write_pnm(Image(Shape{1, 2, 2}, 0.0), path.string());
  const std::string expected = std::string("P5\n2 2\n255\n") +
                               std::string(4, '\0');
  EXPECT_EQ(file_bytes(path), expected);
  fs::remove(path);

  const fs::path ones = temp_file("plb-ones.pgm");
  plb::write_pnm(Image(Shape{1, 1, 2}, 1.0), ones.string());
  const std::string top = file_bytes(ones);
  EXPECT_EQ(static_cast<unsigned char>(top[top.size() - 1]), 255u);
  EXPECT_EQ(static_cast<unsigned char>(top[top.size() - 2]), 255u);
  fs::remove(ones);
}

TEST(WritePnm, QuantizesWithinHalfAStepAndClamps) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> val(-0.2, 1.2);
  Image img(Shape{1, 4, 4});
  for (double& v : img.data()) v = val(rng);
  const fs::path path = temp_file("plb-quant.pgm");
  plb::write_pnm(img, path.string());
  const std::string bytes = file_bytes(path);
  const std::string header = "P5\n4 4\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 16);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  for (int i = 0; i < 16; ++i) {
    const double stored =
        static_cast<double>(
            static_cast<unsigned char>(bytes[header.size() + i])) /
        255.0;
    const double clamped = std::clamp(img[i], 0.0, 1.0);
    EXPECT_NEAR(stored, clamped, 0.5 / 255.0 + 1e-12);
  }
  fs::remove(path);
}

TEST(WritePnm, WritesInterleavedPpmForThreeChannels) {
  Image img(Shape{3, 1, 2});
  img.at(0, 0, 0) = 1.0;  // red pixel 0
  img.at(1, 0, 0) = 0.0;
  img.at(2, 0, 0) = 0.0;
  img.at(0, 0, 1) = 0.0;  // blue pixel 1
  img.at(1, 0, 1) = 0.0;
  img.at(2, 0, 1) = 1.0;
  const fs::path path = temp_file("plb-rgb.ppm");
  plb::write_pnm(img, path.string());
  const std::string bytes = file_bytes(path);
  const std::string header = "P6\n2 1\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 6);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  const auto px = [&](int i) {
    return static_cast<unsigned char>(bytes[header.size() + i]);
  };
  EXPECT_EQ(px(0), 255u);  // R G B of pixel 0
  EXPECT_EQ(px(1), 0u);
  EXPECT_EQ(px(2), 0u);
  EXPECT_EQ(px(3), 0u);    // R G B of pixel 1
  EXPECT_EQ(px(4), 0u);
  EXPECT_EQ(px(5), 255u);
  fs::remove(path);

  EXPECT_THROW(plb::write_pnm(Image(Shape{2, 1, 1}, 0.5), path.string()),
               std::invalid_argument);
}

}  // namespace
