// Command-line front end; talks to the library only through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hardyforge/hardyforge.h"

namespace {

int exit_for(hf_status s) {
  switch (s) {
    case HF_OK: return 0;
    case HF_ERR_NOT_ENTANGLED: return 2;
    case HF_ERR_CONSTRUCTION: return 3;
    default: return 1;
  }
}

int fail(hf_status s) {
  std::cerr << "error: " << hf_last_error() << "\n";
  return exit_for(s);
}

// Takes ownership of s.
void emit(char* s, const std::string& out) {
  if (out.empty()) {
    std::cout << s << "\n";
  } else {
    std::ofstream f(out);
    f << s << "\n";
    if (!f) std::cerr << "error: cannot write " << out << "\n";
  }
  hf_string_free(s);
}

struct StateHandle {
  hf_state* ptr = nullptr;
  ~StateHandle() { hf_state_free(ptr); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-inequality violation certificates for entangled pure states"};
  app.set_version_flag("--version", hf_version());
  app.require_subcommand(1);

  hf_options opts;
  hf_options_default(&opts);
  bool policy_search = false;
  std::string state_path, out_path, settings_path, name, dims_text;
  int n = 4, count = 100, lhv_n = 2;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--seed", opts.seed, "random seed");
    sub->add_option("--restarts", opts.restarts, "optimizer restarts (0: 16 + 8n)");
    sub->add_option("--tol", opts.tol, "optimizer convergence tolerance");
    sub->add_option("--margin", opts.margin, "required excess over the classical bound");
    sub->add_flag("--policy-search", policy_search, "search complement policies (qudits, n <= 8)");
    sub->add_option("--max-n", opts.max_n, "largest n for exhaustive classical enumeration")
        ->check(CLI::Range(2, 13));
  };

  auto* certify = app.add_subcommand("certify", "run the full pipeline and write a certificate");
  certify->add_option("--state", state_path, "state JSON")->required();
  common(certify);

  auto* construct = app.add_subcommand("construct", "write measurement settings for a state");
  construct->add_option("--state", state_path, "state JSON")->required();
  common(construct);

  auto* evaluate = app.add_subcommand("evaluate", "evaluate given settings on a state");
  evaluate->add_option("--state", state_path, "state JSON")->required();
  evaluate->add_option("--settings", settings_path, "settings JSON")->required();
  common(evaluate);

  auto* lhv = app.add_subcommand("lhv", "exhaustive classical bound");
  lhv->add_option("--n", lhv_n, "number of parties")->required();
  common(lhv);

  auto* example = app.add_subcommand("example", "reproduce a worked example");
  example->add_option("name", name, "w3, ghz3, ghz-n or mixed5")->required();
  example->add_option("--n", n, "parties for ghz-n");
  common(example);

  auto* random = app.add_subcommand("random", "certify a batch of Haar-random states");
  random->add_option("--dims", dims_text, "comma-separated local dimensions")->required();
  random->add_option("--count", count, "number of states");
  common(random);

  CLI11_PARSE(app, argc, argv);
  opts.policy_search = policy_search ? 1 : 0;

  if (certify->parsed() || construct->parsed() || evaluate->parsed()) {
    StateHandle st;
    if (hf_status s = hf_state_load(state_path.c_str(), &st.ptr); s != HF_OK) return fail(s);
    char* text = nullptr;
    if (certify->parsed()) {
      int code = 0;
      if (hf_status s = hf_certify(st.ptr, &opts, &text, &code); s != HF_OK) return fail(s);
      emit(text, out_path);
      return code;
    }
    if (construct->parsed()) {
      if (hf_status s = hf_construct(st.ptr, &opts, &text); s != HF_OK) return fail(s);
      emit(text, out_path);
      return 0;
    }
    const std::string settings = slurp(settings_path);
    if (settings.empty()) {
      std::cerr << "error: cannot read " << settings_path << "\n";
      return 1;
    }
    int violation = 0;
    if (hf_status s = hf_evaluate(st.ptr, settings.c_str(), &opts, &text, &violation); s != HF_OK) return fail(s);
    emit(text, out_path);
    return violation ? 0 : 3;
  }

  if (lhv->parsed()) {
    if (lhv_n > opts.max_n) {
      std::cerr << "error: n = " << lhv_n << " exceeds --max-n " << opts.max_n << "\n";
      return 1;
    }
    char* text = nullptr;
    if (hf_status s = hf_lhv(lhv_n, &text); s != HF_OK) return fail(s);
    emit(text, out_path);
    return 0;
  }

  if (example->parsed()) {
    char *text = nullptr, *table = nullptr;
    int pass = 0;
    if (hf_status s = hf_example(name.c_str(), n, &opts, &text, &table, &pass); s != HF_OK) return fail(s);
    std::cout << table;
    hf_string_free(table);
    if (out_path.empty())
      hf_string_free(text);
    else
      emit(text, out_path);
    return pass ? 0 : 3;
  }

  std::vector<int> dims;
  {
    std::stringstream ss(dims_text);
    std::string item;
    try {
      while (std::getline(ss, item, ',')) dims.push_back(std::stoi(item));
    } catch (const std::exception&) {
      std::cerr << "error: --dims expects integers like 2,2,2\n";
      return 1;
    }
  }
  char* text = nullptr;
  if (hf_status s = hf_random_batch(dims.data(), dims.size(), opts.seed, count, &opts, &text); s != HF_OK)
    return fail(s);
  const auto summary = nlohmann::json::parse(text);
  emit(text, out_path);
  return summary["failures"].empty() ? 0 : 3;
}
