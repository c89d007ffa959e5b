#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace berthstay {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("berthstay_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string slurp(const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

TEST_F(CliTest, MissingInputIsUsageError) {
    EXPECT_EQ(run({"fit", "--input", path("missing.csv")}), cli::kExitUsage);
    EXPECT_NE(err_.str().find("missing.csv"), std::string::npos);
}

TEST_F(CliTest, UnknownCommandAndBadFlags) {
    EXPECT_EQ(run({}), cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}), cli::kExitUsage);
    EXPECT_EQ(run({"synth", "--count", "ten"}), cli::kExitUsage);
    EXPECT_EQ(run({"synth", "--count", "3", "--out", path("a.csv")}), cli::kExitUsage);  // no seed
    EXPECT_NE(err_.str().find("--seed"), std::string::npos);
}

TEST_F(CliTest, SynthIsByteIdentical) {
    ASSERT_EQ(run({"synth", "--seed", "7", "--count", "100", "--out", path("a.csv")}), cli::kExitOk) << err_.str();
    const auto first = slurp(path("a.csv"));
    ASSERT_EQ(run({"synth", "--seed", "7", "--count", "100", "--out", path("a.csv")}), cli::kExitOk);
    EXPECT_EQ(slurp(path("a.csv")), first);
    EXPECT_FALSE(fs::exists(path("a.csv.tmp")));
}

TEST_F(CliTest, PipelineProducesReport) {
    ASSERT_EQ(run({"synth", "--seed", "3", "--count", "200", "--out", path("d.csv")}), cli::kExitOk);
    ASSERT_EQ(run({"fit", "--input", path("d.csv"), "--seed", "1", "--out", path("m.json")}), cli::kExitOk)
        << err_.str();
    ASSERT_EQ(run({"evaluate", "--models", path("m.json"), "--data", path("d.csv"), "--out", path("report.csv")}),
              cli::kExitOk)
        << err_.str();
    EXPECT_TRUE(fs::exists(path("report.csv")));
    fs::create_directories(path("rep"));
    ASSERT_EQ(run({"report", "--models", path("m.json"), "--input", path("d.csv"), "--out", path("rep")}),
              cli::kExitOk);
    EXPECT_TRUE(fs::exists(path("rep/report.json")));
    EXPECT_TRUE(fs::exists(path("rep/histogram_S1.csv")));
    EXPECT_EQ(slurp(path("rep/histogram_S1.csv")).substr(0, 24), "bin_left,bin_right,count");
}

TEST_F(CliTest, PredictModesAndConfig) {
    ASSERT_EQ(run({"synth", "--seed", "3", "--count", "200", "--out", path("d.csv")}), cli::kExitOk);
    ASSERT_EQ(run({"fit", "--input", path("d.csv"), "--seed", "1", "--out", path("m.json")}), cli::kExitOk);
    std::ofstream(path("job.json")) << R"({"terminal": "A", "shipment": "Discharging",
        "cargoes": [{"cargo": "150N", "size_mt": 1500}]})";
    EXPECT_EQ(run({"predict", "--models", path("m.json"), "--input", path("job.json"), "--out", path("p.json"),
                   "--mode", "mc:0"}),
              cli::kExitUsage);
    EXPECT_EQ(run({"predict", "--models", path("m.json"), "--input", path("job.json"), "--out", path("p.json"),
                   "--mode", "mc:100"}),
              cli::kExitUsage);  // stochastic without a seed
    std::ofstream(path("cfg.json")) << R"({"mode": "mc:500", "seed": 4, "scenario": "all"})";
    ASSERT_EQ(run({"predict", "--models", path("m.json"), "--input", path("job.json"), "--out", path("p.json"),
                   "--config", path("cfg.json")}),
              cli::kExitOk)
        << err_.str();
    const auto text = slurp(path("p.json"));
    EXPECT_NE(text.find("\"p90\""), std::string::npos);
    std::ofstream(path("bad.json")) << R"({"colour": "blue"})";
    EXPECT_EQ(run({"predict", "--models", path("m.json"), "--input", path("job.json"), "--out", path("p.json"),
                   "--config", path("bad.json")}),
              cli::kExitUsage);
}

TEST_F(CliTest, DataErrorsExitOne) {
    std::ofstream(path("bad.csv")) << "not,a,log\n";
    EXPECT_EQ(run({"clean", "--input", path("bad.csv"), "--out", path("c.csv")}), cli::kExitDataError);
    EXPECT_NE(err_.str().find("error:"), std::string::npos);
}

TEST_F(CliTest, CleanRespectsDiscardBudget) {
    ASSERT_EQ(run({"synth", "--seed", "5", "--count", "100", "--out", path("d.csv"), "--event-error-rate", "0.2"}),
              cli::kExitOk);
    EXPECT_EQ(run({"clean", "--input", path("d.csv"), "--out", path("c.csv"), "--max-discard", "0.01"}),
              cli::kExitDataError);
    EXPECT_NE(err_.str().find("DiscardBudgetExceeded"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("c.csv")));
}

}  // namespace
}  // namespace berthstay
