// mixcf: command line front end.
//
//   mixcf solve --config exp.json --set grid.n_theta=24 --out report.json --csv w.csv

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mixcf/error.hpp"
#include "mixcf/runner.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the mixed Christoffel problem on S^2"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::string csv_path;

  for (const char* name : {"measure", "solve", "check", "roundtrip", "report"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--set", overrides, "override a config key, e.g. grid.n_theta=24");
    sub->add_option("-o,--out", out_path, "write the JSON report here instead of stdout");
    sub->add_option("--csv", csv_path, "write per-node data (CSV) here");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  mixcf::json doc;
  {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "mixcf: cannot read " << config_path << "\n";
      return mixcf::kExitInput;
    }
    doc = mixcf::json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      std::cerr << "mixcf: " << config_path << " is not valid JSON\n";
      return mixcf::kExitInput;
    }
  }
  try {
    for (const auto& s : overrides) mixcf::apply_override(doc, s);
  } catch (const mixcf::Error& e) {
    std::cerr << "mixcf: " << e.what() << "\n";
    return mixcf::kExitInput;
  }

  const mixcf::RunResult result = mixcf::run_command(command, doc);
  const std::string text = result.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else if (!write_file(out_path, text)) {
    std::cerr << "mixcf: cannot write " << out_path << "\n";
    return mixcf::kExitInput;
  }
  if (!csv_path.empty() && !result.csv.empty() && !write_file(csv_path, result.csv)) {
    std::cerr << "mixcf: cannot write " << csv_path << "\n";
    return mixcf::kExitInput;
  }
  if (result.report.contains("error"))
    std::cerr << "mixcf: " << result.report["error"]["message"].get<std::string>() << "\n";
  return result.exit_code;
}
