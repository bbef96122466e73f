#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "plcsynth/cli.hpp"
#include "plcsynth/engine.hpp"
#include "plcsynth/lang.hpp"

using namespace plcsynth;
namespace fs = std::filesystem;

namespace {

const char *kOrBlock = "FUNCTION_BLOCK B\n"
                       "VAR_INPUT a : BOOL; b : BOOL; END_VAR\n"
                       "VAR_OUTPUT y : BOOL; END_VAR\n"
                       "BEGIN\n  y := a OR b;\nEND_FUNCTION_BLOCK\n";

const char *kIface = "  <interface>\n"
                     "    <var name=\"a\" dir=\"in\" type=\"BOOL\"/>\n"
                     "    <var name=\"b\" dir=\"in\" type=\"BOOL\"/>\n"
                     "    <var name=\"y\" dir=\"out\" type=\"BOOL\"/>\n"
                     "  </interface>\n";

std::string list_xml(const std::string &mode, const std::string &body) {
  return "<constraintList block=\"B\" mode=\"" + mode + "\">\n" + kIface + body + "</constraintList>\n";
}

const std::string kAndTable = "  <truthTable>\n"
                              "    <row in=\"a=0;b=0\" out=\"y=0\"/>\n"
                              "    <row in=\"a=0;b=1\" out=\"y=0\"/>\n"
                              "    <row in=\"a=1;b=0\" out=\"y=0\"/>\n"
                              "    <row in=\"a=1;b=1\" out=\"y=1\"/>\n"
                              "  </truthTable>\n";

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("plcsynth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    write("or.st", kOrBlock);
    write("and.xml", list_xml("generate", kAndTable));
    write("impl.xml", list_xml("verify", "  <assertion expr=\"a OR NOT y\"/>\n"));
  }
  void TearDown() override { fs::remove_all(dir); }

  void write(const std::string &name, const std::string &text) {
    std::ofstream(dir / name, std::ios::binary) << text;
  }
  std::string path(const std::string &name) const { return (dir / name).string(); }

  int run_cli(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return run(args, out, err);
  }

  fs::path dir;
  std::ostringstream out, err;
};

} // namespace

TEST_F(Cli, SynthWritesEquivalentBlock) {
  ASSERT_EQ(run_cli({"synth", "--constraints", path("and.xml"), "--out", path("and.st")}), 0) << err.str();
  Block b = load_block(path("and.st"));
  Block want = parse_st("FUNCTION_BLOCK B VAR_INPUT a:BOOL; b:BOOL; END_VAR VAR_OUTPUT y:BOOL; END_VAR "
                        "BEGIN y := a AND b; END_FUNCTION_BLOCK");
  EXPECT_TRUE(equivalent(b, want).is_verified());
  EXPECT_NE(out.str().find("synthesized B: slots=1"), std::string::npos);
}

TEST_F(Cli, SynthToStdoutIsJustTheBlock) {
  ASSERT_EQ(run_cli({"synth", "--constraints", path("and.xml"), "--lang", "il"}), 0);
  Block b = parse_il(out.str());
  EXPECT_EQ(b.lang, Lang::IL);
  EXPECT_NE(err.str().find("synthesized"), std::string::npos);
}

TEST_F(Cli, VerifyViolationAndSuccess) {
  EXPECT_EQ(run_cli({"verify", "--block", path("or.st"), "--constraints", path("impl.xml")}), 1);
  EXPECT_EQ(out.str().rfind("Violated\n", 0), 0u);
  EXPECT_NE(out.str().find("cycle 0: a=0 b=1"), std::string::npos);
  write("weak.xml", list_xml("verify", "  <assertion expr=\"y OR NOT a\"/>\n"));
  EXPECT_EQ(run_cli({"verify", "--block", path("or.st"), "--constraints", path("weak.xml"), "--cycles", "2"}), 0);
  EXPECT_EQ(out.str(), "Verified (2 cycles)\n");
}

TEST_F(Cli, RepairTranslateSimplifyExtend) {
  ASSERT_EQ(run_cli({"repair", "--block", path("or.st"), "--constraints", path("and.xml"), "--out", path("fixed.st")}), 0);
  EXPECT_NE(out.str().find("nodes_changed=1"), std::string::npos);
  EXPECT_EQ(load_block(path("fixed.st")).body.at(0).rhs, Expr::conj(Expr::var("a"), Expr::var("b")));

  ASSERT_EQ(run_cli({"translate", "--block", path("or.st"), "--to", "il", "--out", path("or.il")}), 0);
  EXPECT_EQ(load_block(path("or.il")).lang, Lang::IL);
  EXPECT_TRUE(equivalent(load_block(path("or.il")), load_block(path("or.st"))).is_verified());

  write("red.st", "FUNCTION_BLOCK B\nVAR_INPUT a : BOOL; b : BOOL; END_VAR\nVAR_OUTPUT y : BOOL; END_VAR\n"
                  "BEGIN\n  y := a AND b OR a AND NOT b;\nEND_FUNCTION_BLOCK\n");
  ASSERT_EQ(run_cli({"simplify", "--block", path("red.st"), "--out", path("small.il")}), 0);
  Block small = load_block(path("small.il"));
  EXPECT_EQ(small.body.at(0).rhs, Expr::var("a"));

  write("extra.xml", list_xml("extend", "  <truthTable>\n    <row in=\"a=1;b=1\" out=\"y=0\"/>\n  </truthTable>\n"));
  write("copy.st", "FUNCTION_BLOCK B\nVAR_INPUT a : BOOL; b : BOOL; END_VAR\nVAR_OUTPUT y : BOOL; END_VAR\n"
                   "BEGIN\n  y := a;\nEND_FUNCTION_BLOCK\n");
  ASSERT_EQ(run_cli({"extend", "--block", path("copy.st"), "--constraints", path("extra.xml"), "--out", path("ext.st")}), 0);
  Block want = parse_st("FUNCTION_BLOCK B VAR_INPUT a:BOOL; b:BOOL; END_VAR VAR_OUTPUT y:BOOL; END_VAR "
                        "BEGIN y := a AND NOT b; END_FUNCTION_BLOCK");
  EXPECT_TRUE(equivalent(load_block(path("ext.st")), want).is_verified());
}

TEST_F(Cli, CheckReportsConflicts) {
  EXPECT_EQ(run_cli({"check", "--constraints", path("and.xml")}), 0);
  EXPECT_EQ(out.str(), "consistent: 4 constraints\n");
  write("bad.xml", list_xml("generate", "  <truthTable>\n    <row in=\"a=1;b=-\" out=\"y=1\"/>\n"
                                        "    <row in=\"b=0\" out=\"y=0\"/>\n  </truthTable>\n"));
  EXPECT_EQ(run_cli({"check", "--constraints", path("bad.xml")}), 1);
  EXPECT_EQ(out.str(), "conflict: constraint 1 and constraint 2 disagree on y for a=1 b=0\n");
}

TEST_F(Cli, Bench) {
  ASSERT_EQ(run_cli({"bench", "--scenario", "magnet", "--repeat", "3", "--seed", "4"}), 0);
  EXPECT_NE(out.str().find("repeat 3: seed=6 calls=1"), std::string::npos);
  EXPECT_TRUE(std::regex_search(out.str(), std::regex("magnet: n=3 mean=[0-9.]+ ms stddev=[0-9.]+ ms")));
  EXPECT_EQ(run_cli({"bench", "--scenario", "magnet", "--repeat", "1"}), 2);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}), 2);
  EXPECT_EQ(run_cli({"frobnicate"}), 2);
  EXPECT_EQ(run_cli({"synth"}), 2);
  EXPECT_EQ(run_cli({"verify", "--block", path("missing.st"), "--constraints", path("impl.xml")}), 2);
  write("broken.st", "FUNCTION_BLOCK B BEGIN y := ; END_FUNCTION_BLOCK");
  EXPECT_EQ(run_cli({"simplify", "--block", path("broken.st")}), 2);
  write("bad.xml", "<constraintList block=\"B\"");
  EXPECT_EQ(run_cli({"check", "--constraints", path("bad.xml")}), 2);
  write("unsat.xml", list_xml("generate", "  <truthTable>\n    <row in=\"a=1\" out=\"y=1\"/>\n"
                                          "    <row in=\"a=1\" out=\"y=0\"/>\n  </truthTable>\n"));
  EXPECT_EQ(run_cli({"synth", "--constraints", path("unsat.xml")}), 1);
  write("badexpr.xml", list_xml("generate", "  <assertion expr=\"y = a\"/>\n"));
  EXPECT_EQ(run_cli({"synth", "--constraints", path("badexpr.xml")}), 2);
  write("andnot.xml", list_xml("generate", "  <causeEffect output=\"y\" combinator=\"all\">\n"
                                        "    <cause input=\"a\" mark=\"x\"/>\n    <cause input=\"b\" mark=\"n\"/>\n"
                                        "  </causeEffect>\n"));
  EXPECT_EQ(run_cli({"synth", "--constraints", path("andnot.xml"), "--max-slots", "1"}), 3);
  EXPECT_EQ(run_cli({"--help"}), 0);
}

TEST_F(Cli, OutputsAreDeterministic) {
  const std::vector<std::vector<std::string>> cmds{
      {"synth", "--constraints", path("and.xml"), "--out", path("o.st"), "--seed", "3"},
      {"repair", "--block", path("or.st"), "--constraints", path("and.xml"), "--out", path("o.st")},
      {"simplify", "--block", path("or.st"), "--out", path("o.st")},
      {"translate", "--block", path("or.st"), "--to", "il", "--out", path("o.st")},
  };
  for (const auto &c : cmds) {
    ASSERT_EQ(run_cli(c), 0);
    const std::string first = slurp(path("o.st"));
    ASSERT_EQ(run_cli(c), 0);
    EXPECT_EQ(slurp(path("o.st")), first);
  }
}

TEST(ProjectLayout, LoadsAndRejectsDuplicates) {
  const fs::path root = fs::temp_directory_path() / "plcsynth_project_test";
  fs::remove_all(root);
  fs::create_directories(root / "blocks");
  fs::create_directories(root / "constraints");
  std::ofstream(root / "blocks" / "b.st") << kOrBlock;
  std::ofstream(root / "constraints" / "c.xml") << list_xml("verify", "  <assertion expr=\"y\"/>\n");
  ProjectLayout p = ProjectLayout::load(root);
  EXPECT_EQ(p.blocks.size(), 1u);
  EXPECT_EQ(p.constraints.size(), 1u);
  std::ofstream(root / "blocks" / "dup.il") << emit(parse_st(kOrBlock), Lang::IL);
  EXPECT_THROW(ProjectLayout::load(root), TypeError);
  fs::remove(root / "blocks" / "dup.il");
  std::ofstream(root / "constraints" / "d.xml")
      << "<constraintList block=\"Nope\" mode=\"verify\"><interface/></constraintList>";
  EXPECT_THROW(ProjectLayout::load(root), TypeError);
  fs::remove_all(root);
}
