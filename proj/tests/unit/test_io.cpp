#include <atomic>
#include <clocale>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>

#include "bayesdoe/campaign.hpp"
#include "bayesdoe/csv.hpp"
#include "bayesdoe/errors.hpp"
#include "bayesdoe/persistence.hpp"
#include "golden.hpp"

using namespace bayesdoe;
namespace fs = std::filesystem;

namespace {

const DesignSpace kSpace({{"a", 0, 10, ""}, {"b", -1, 1, ""}});
const CsvSchema kSchema = CsvSchema::for_space(kSpace, {OutputColumn::objective("y")});

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("bayesdoe-io-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

CampaignState sample_state() {
  const auto g = testing_support::load_golden("BBcon");
  AcquisitionSpec acq = *g.doc.acquisition;
  acq.weights = {};
  CampaignSettings settings;
  settings.strategy = BatchStrategy::local_penalization;
  settings.fit.seed = 77;
  CampaignState s = init_campaign(g.doc.space, g.doc.outputs, acq, 0xdeadbeefcafeULL, settings);
  std::vector<Observation> rows;
  for (Eigen::Index i = 0; i < g.data.points().rows(); ++i) {
    rows.push_back({g.data.points().row(i).transpose(), g.data.outputs().row(i).transpose()});
  }
  s = tell(s, rows, "batch-1");
  return ask(s, 2, {.strategy = {}, .seed = {}, .request_id = "ask-1"}).state;
}

}  // namespace

TEST(GoldenFiles, Shapes) {
  struct Expect {
    const char* name;
    std::size_t n, d, m;
  };
  for (const Expect e : {Expect{"BatchObj", 27, 4, 1}, Expect{"MultiObj", 24, 4, 4}, Expect{"BBcon", 17, 3, 2}}) {
    const auto g = testing_support::load_golden(e.name);
    EXPECT_EQ(g.data.size(), e.n) << e.name;
    EXPECT_EQ(g.data.dim(), e.d) << e.name;
    EXPECT_EQ(g.data.num_outputs(), e.m) << e.name;
  }
}

TEST(GoldenFiles, ColumnsAreMatchedByName) {
  // SurfRough lists scanning speed before layer thickness; the space does not.
  const DesignSpace space({{"Laser_power", 180, 240, ""}, {"Layer_thickness", 20, 35, ""}, {"Scanning_speed", 500, 800, ""}});
  const Dataset d = load_csv(testing_support::data_file("SurfRough.csv"),
                             CsvSchema::for_space(space, {OutputColumn::objective("Surface_roughness", Sense::minimize)}),
                             space);
  EXPECT_EQ(d.size(), 21u);
  EXPECT_EQ(d.points().row(1), Eigen::RowVector3d(180, 25, 600));
}

TEST(LoadCsv, MissingColumnIsNamed) {
  try {
    parse_dataset("a,y\n1,2\n", kSchema, kSpace);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos) << e.what();
  }
}

TEST(LoadCsv, ParseErrorNamesRowAndColumn) {
  try {
    parse_dataset("a,b,y\n1,0,2\n2,0.5,oops\n", kSchema, kSpace);
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'y'"), std::string::npos) << msg;
  }
  EXPECT_THROW(parse_dataset("a,b,y\n1,0,1,000\n", kSchema, kSpace), ParseError);
  EXPECT_THROW(parse_dataset("a,b,y\n\"1,5\",0,1\n", kSchema, kSpace), ParseError);
}

TEST(LoadCsv, OutOfBoundsRejectedOrClamped) {
  const std::string text = "a,b,y\n11,0,1\n5,0,2\n-1,2,3\n";
  try {
    parse_dataset(text, kSchema, kSpace);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("1"), std::string::npos);
    EXPECT_NE(msg.find("3"), std::string::npos);
  }
  std::vector<std::string> warnings;
  CsvOptions opts;
  opts.clamp_out_of_bounds = true;
  opts.warn = [&](const std::string& w) { warnings.push_back(w); };
  const Dataset d = parse_dataset(text, kSchema, kSpace, opts);
  EXPECT_EQ(d.points().row(0), Eigen::RowVector2d(10, 0));
  EXPECT_EQ(d.points().row(2), Eigen::RowVector2d(0, 1));
  EXPECT_FALSE(warnings.empty());
}

TEST(LoadCsv, LineEndingsBomAndQuotes) {
  const Dataset lf = parse_dataset("a,b,y\n1,0.5,2\n3,-0.25,4\n", kSchema, kSpace);
  const Dataset crlf = parse_dataset("\xEF\xBB\xBF" "a,b,y\r\n1,0.5,2\r\n\r\n\"3\",-0.25,4\r\n", kSchema, kSpace);
  EXPECT_EQ(lf.points(), crlf.points());
  EXPECT_EQ(lf.outputs(), crlf.outputs());
}

TEST(LoadCsv, LocaleIndependent) {
  const char* prev = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = prev ? prev : "C";
  // Any installed comma-decimal locale would do; fall back silently if none is.
  const char* set = nullptr;
  for (const char* name : {"de_DE.UTF-8", "de_DE.utf8", "fr_FR.UTF-8", "C.UTF-8"}) {
    if ((set = std::setlocale(LC_NUMERIC, name))) break;
  }
  double v = 0.0;
  EXPECT_TRUE(parse_number("0.125", v));
  EXPECT_EQ(v, 0.125);
  EXPECT_FALSE(parse_number("0,125", v));
  EXPECT_EQ(format_number(1.5), "1.5");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Numbers, ShortestRoundTrip) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) / (1 + i);
    double back = 0.0;
    ASSERT_TRUE(parse_number(format_number(x), back));
    EXPECT_EQ(back, x);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  double v = 0.0;
  EXPECT_FALSE(parse_number("nan", v));
  EXPECT_FALSE(parse_number("1e999", v));
  EXPECT_FALSE(parse_number("", v));
  EXPECT_TRUE(parse_number("+2.5e-3", v));
  EXPECT_EQ(v, 2.5e-3);
}

TEST(LoadCsv, CsvRoundTrip) {
  const auto g = testing_support::load_golden("MultiObj");
  const CsvSchema schema = CsvSchema::for_space(g.doc.space, g.doc.outputs);
  const std::string text = to_csv(g.data, schema);
  const Dataset back = parse_dataset(text, schema, g.doc.space);
  EXPECT_EQ(back.points(), g.data.points());
  EXPECT_EQ(back.outputs(), g.data.outputs());
  EXPECT_EQ(to_csv(back, schema), text);
}

TEST(Schema, Validation) {
  CsvSchema s{{"a", "y"}, {OutputColumn::objective("y")}, ','};
  EXPECT_THROW(s.validate(), SchemaError);
  s.input_columns = {};
  EXPECT_THROW(s.validate(), SchemaError);
}

TEST(Preferences, PairFileAndValidity) {
  const auto pairs = parse_preference_pairs("winner,loser\n0,1\n1,2\n");
  EXPECT_EQ(pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
  EXPECT_THROW(parse_preference_pairs("winner,loser\n0,-1\n"), ParseError);
  const CsvTable t = parse_csv_table("x,Class\n1,1\n2,0\n");
  EXPECT_EQ(parse_validity(t), (std::vector<bool>{true, false}));
}

TEST(Persistence, RoundTripIsExact) {
  const CampaignState s = sample_state();
  const std::string doc = save_campaign(s);
  const CampaignState back = load_campaign(doc);
  EXPECT_TRUE(back == s);
  EXPECT_EQ(back.seed, 0xdeadbeefcafeULL);
  EXPECT_EQ(back.revision, s.revision);
  EXPECT_EQ(save_campaign(back), doc);
  // Subsequent behaviour matches, not only the fields.
  EXPECT_EQ(ask(back, 2).batch, ask(s, 2).batch);
}

TEST(Persistence, UnknownFieldWarns) {
  std::string doc = save_campaign(sample_state());
  doc.insert(doc.find('{') + 1, "\"future_field\": 42,");
  std::vector<std::string> warnings;
  const CampaignState s = load_campaign(doc, [&](const std::string& w) { warnings.push_back(w); });
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("future_field"), std::string::npos);
  EXPECT_EQ(s.data.size(), 17u);
}

TEST(Persistence, VersionMismatchNamesBothVersions) {
  std::string doc = save_campaign(sample_state());
  const auto pos = doc.find("\"schema_version\": 1");
  ASSERT_NE(pos, std::string::npos);
  doc.replace(pos, 19, "\"schema_version\": 0");
  try {
    load_campaign(doc);
    FAIL();
  } catch (const MigrationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("schema_version 0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("schema_version 1"), std::string::npos) << msg;
  }
}

TEST(Persistence, CorruptedDocument) {
  const std::string doc = save_campaign(sample_state());
  EXPECT_THROW(load_campaign(doc.substr(0, doc.size() / 2)), ParseError);
  EXPECT_THROW(load_campaign("[1, 2]"), Error);
}

TEST(Persistence, CompareAndSwap) {
  TempDir dir;
  const std::string path = dir.file("c.json");
  const CampaignState s = sample_state();
  write_campaign(path, s, kNoCampaign);
  EXPECT_THROW(write_campaign(path, s, kNoCampaign), ConflictError);
  const CampaignState next = tell(s, {});
  write_campaign(path, next, s.revision);
  try {
    write_campaign(path, tell(s, {}), s.revision);
    FAIL();
  } catch (const ConflictError& e) {
    EXPECT_EQ(e.current_revision(), next.revision);
  }
  EXPECT_TRUE(read_campaign(path) == next);
}

TEST(Persistence, ConcurrentWritersSerialize) {
  TempDir dir;
  const std::string path = dir.file("c.json");
  const CampaignState s = sample_state();
  write_campaign(path, s, kNoCampaign);
  const CampaignState next = tell(s, {});
  std::atomic<int> wins{0}, conflicts{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      try {
        write_campaign(path, next, s.revision);
        ++wins;
      } catch (const ConflictError&) {
        ++conflicts;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(wins.load(), 1);
  EXPECT_EQ(conflicts.load(), 7);
  EXPECT_EQ(read_campaign(path).revision, next.revision);
  // No temporary files left behind.
  for (const auto& e : fs::directory_iterator(fs::path(path).parent_path())) {
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos) << e.path();
  }
}

TEST(Persistence, SpaceDocument) {
  const SpaceDocument d = parse_space_document(
      R"({"variables": [{"name": "t", "lower": 1, "upper": 2, "unit": "s"}],
          "outputs": [{"name": "c", "role": "constraint", "threshold": 3, "direction": "ge"}, {"name": "y", "sense": "minimize"}],
          "acquisition": {"kind": "efi"}})");
  EXPECT_EQ(d.space.dim(), 1u);
  ASSERT_EQ(d.outputs.size(), 2u);
  EXPECT_EQ(d.outputs[0].role, OutputRole::constraint);
  EXPECT_EQ(d.outputs[0].direction, ConstraintDirection::ge);
  EXPECT_EQ(d.outputs[1].sense, Sense::minimize);
  EXPECT_EQ(d.acquisition->kind, AcquisitionKind::efi);
  EXPECT_THROW(parse_space_document(R"({"variables": [{"name": "t", "lower": 3, "upper": 2}]})"), Error);
  EXPECT_THROW(parse_space_document("{"), ParseError);
}
