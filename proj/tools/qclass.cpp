#include "qclass/conventions.hpp"
#include "qclass/manifest.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitLoadError = 2;

int run_command(const std::string& path, const std::string& out_path, const qclass::RunOptions& opt) {
  std::optional<qclass::Manifest> loaded;
  try {
    loaded = qclass::load_manifest(path);
  } catch (const std::exception& e) {
    std::cerr << "qclass: load error: " << e.what() << "\n";
    return kExitLoadError;
  }
  const auto& manifest = *loaded;
  const auto result = qclass::run_tasks(manifest, opt);
  const std::string text = result.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "qclass: cannot write " << out_path << "\n";
      return kExitLoadError;
    }
    out << text;
    std::cout << qclass::format_summary(manifest, result);
  }
  return result.exit_code;
}

int check_command(const std::string& path) {
  std::optional<qclass::Manifest> loaded;
  try {
    loaded = qclass::load_manifest(path);
  } catch (const std::exception& e) {
    std::cerr << "qclass: load error: " << e.what() << "\n";
    return kExitLoadError;
  }
  const auto& manifest = *loaded;
  const bool ok = qclass::bracket(manifest.model.q.field(), manifest.model.q.field()).is_zero();
  std::cout << "model: " << manifest.model.description << "\n"
            << "chart: " << manifest.model.chart()->even_count() << "|" << manifest.model.chart()->odd_count() << "\n"
            << (ok ? "[PASS]" : "[FAIL]") << " [Q,Q] = 0\n";
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact characteristic classes of Q-manifolds"};
  app.require_subcommand(1);

  std::string manifest_path, out_path;
  qclass::RunOptions opt;

  auto* run = app.add_subcommand("run", "Load a manifest and run its tasks");
  run->add_option("manifest", manifest_path, "Manifest file (JSON)")->required();
  run->add_option("--out", out_path, "Write the JSON report here instead of stdout");
  run->add_flag("--parallel", opt.parallel, "Run independent tasks concurrently");
  run->add_option("--max-order", opt.max_order, "Largest series order a task may request")->check(CLI::Range(0, 64));

  auto* check = app.add_subcommand("check", "Load a manifest and certify [Q,Q] = 0");
  check->add_option("manifest", manifest_path, "Manifest file (JSON)")->required();

  auto* conventions = app.add_subcommand("explain-conventions", "Print the sign-convention handbook");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitLoadError;
  }

  if (run->parsed()) return run_command(manifest_path, out_path, opt);
  if (check->parsed()) return check_command(manifest_path);
  if (conventions->parsed()) {
    std::cout << qclass::kConventionsHandbook;
    return kExitOk;
  }
  return kExitLoadError;
}
