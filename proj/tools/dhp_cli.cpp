#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dhp/cli.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

}  // namespace

int main(int argc, char** argv) {
  dhp::RunConfig cfg;
  for (int i = 1; i < argc; ++i) cfg.argv.emplace_back(argv[i]);

  // defaults from the config file named by the environment; flags override them
  if (const char* path = std::getenv(dhp::kConfigEnv); path && *path) {
    std::ifstream f(path);
    if (!f) {
      std::cerr << "ConfigError: cannot read config file " << path << "\n";
      return 2;
    }
    std::stringstream ss;
    ss << f.rdbuf();
    try {
      dhp::apply_config_json(cfg, ss.str());
    } catch (const dhp::Error& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"Lattice checks for Drinfeld and unitary moduli problems"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--p", cfg.p, "residue characteristic");
  app.add_option("--f", cfg.f, "residue degree of F over Q_p");
  app.add_option("--case", cfg.kind, "unramified or ramified")->check(CLI::IsMember({"unramified", "ramified"}));
  app.add_option("--m", cfg.m, "degree of the coefficient ring over the residue field of E");
  app.add_option("--prec", cfg.prec, "working precision N");
  app.add_option("--choice", cfg.generator_choice, "which non-square / non-norm unit to use");
  app.add_option("--radius", cfg.radius, "ball radius for tree commands");
  app.add_option("--box", cfg.box, "box size c for enumeration");
  app.add_option("--samples", cfg.samples, "sample count for randomized checks");
  app.add_option("--seed", cfg.seed, "seed for randomized checks");
  app.add_option("--out", cfg.out, "report path, or artifact path/format (dot, json, list) for tree build and vertex enumerate");
  app.add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"json", "text"}));

  std::string action;
  auto sub = [&](const char* name, const char* help, std::vector<std::string> actions) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("action", action)->required()->check(CLI::IsMember(actions));
    return s;
  };
  sub("framing", "framing checks", {"validate"});
  sub("lemma", "lattice lemma suites", {"2.2", "2.3", "3.2", "3.3"});
  sub("theorem", "point-level shadow of the main isomorphism", {"shadow"});
  sub("iso", "quaternion and group identities", {"check"});
  sub("lines", "isotropic lines of reduced forms", {"isotropic"});
  auto* tree = sub("tree", "Bruhat-Tits balls", {"build", "compare"});
  tree->add_option("--side", cfg.side, "pu or pgl2")->check(CLI::IsMember({"pu", "pgl2"}));
  sub("vertex", "vertex lattices near the standard one", {"enumerate"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.command = {app.get_subcommands().front()->get_name(), action};

  const auto r = dhp::run(cfg);
  if (r.exit_code == 2) {
    std::cerr << r.error << "\n";
    return 2;
  }
  const std::string report = cfg.format == "json" ? dhp::serialize_json(r.report) : dhp::serialize_text(r.report);

  if (dhp::is_artifact_command(cfg.command)) {
    const bool keyword = cfg.out.empty() || cfg.out == "dot" || cfg.out == "json" || cfg.out == "list";
    if (keyword) {
      std::cout << r.artifact;
      std::cerr << report;
    } else {
      if (!write_file(cfg.out, r.artifact)) {
        std::cerr << "ConfigError: cannot write " << cfg.out << "\n";
        return 2;
      }
      std::cout << report;
    }
  } else if (!cfg.out.empty()) {
    if (!write_file(cfg.out, report)) {
      std::cerr << "ConfigError: cannot write " << cfg.out << "\n";
      return 2;
    }
  } else {
    std::cout << report;
  }
  return r.exit_code;
}
