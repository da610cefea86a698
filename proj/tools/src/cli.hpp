#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flipspec/experiments.hpp"

namespace flipspec::cli {

struct Options {
  std::string command;
  ExperimentConfig config;
  std::string out_dir = ".";
  std::string suite = "all";
  std::vector<int> sizes;      // table rows or verify sizes
  std::string export_matrix;   // "", "bin" or "csv"
  bool diagnostic = false;     // table: add the exact-preconditioner row
};

// Exit codes: 0 success, 1 usage error, 2 verification failures.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

int cmd_spectrum(const Options& options, std::ostream& out);
int cmd_match(const Options& options, std::ostream& out);
int cmd_table(const Options& options, std::ostream& out);
int cmd_verify(const Options& options, std::ostream& out);

// "# flipspec <version> <command> <config>" for every output file.
std::string header_line(const std::string& command, const Options& options);

}  // namespace flipspec::cli
