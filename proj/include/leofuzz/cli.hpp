#pragma once
// CLI entry points. Each cmd_* is callable in-process and returns the exit
// code: 0 success / all targets reached, 1 usage or input errors, 2 budget
// exhausted with targets remaining.

#include <iosfwd>

#include "leofuzz/bench.hpp"

namespace leofuzz {

struct GenseqArgs {
  std::string graphs_path;
  std::string targets_path;
  std::string out_path;  // empty = stdout
  double epsilon = 0.5;
};

struct FuzzArgs {
  std::string graphs_path;
  std::string targets_path;
  std::string program_path;
  std::string seeds_dir;
  std::string sequences_path;  // optional genseq output; else generated
  std::string out_dir = "out";
  CampaignConfig campaign;
  std::string budget;  // "60s", "5m"; empty = exec budget only
};

struct BenchArgs {
  std::vector<std::string> fixture_specs;  // program.json:targets.txt[:name]
  std::string seeds_dir;
  std::string out_path;  // JSON report; empty = stdout table only
  BenchConfig bench;
};

struct ReportArgs {
  std::string stats_path;
};

int cmd_genseq(const GenseqArgs& args, std::ostream& out, std::ostream& err);
int cmd_fuzz(const FuzzArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

// key=value lines, # comments; keys mirror the long flag names.
std::map<std::string, std::string> parse_config_file(std::istream& in,
                                                     const std::string& origin);

double parse_duration_s(const std::string& text);  // "90", "90s", "5m", "1h"

std::vector<Bytes> load_seed_dir(const std::string& dir);

// Sequences as emitted by genseq: one JSON object per line.
void write_sequences(std::ostream& out, std::span<const TargetSequence> seqs);
std::vector<TargetSequence> read_sequences(std::istream& in, const std::string& origin);

int run_cli(int argc, const char* const* argv);

}  // namespace leofuzz
