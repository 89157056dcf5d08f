// softenlf command-line front end.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softenlf.hpp"

namespace {

using namespace soften;

struct Loaded {
  Diagram diagram;
  std::size_t prelude_size = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ":0:0: cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ":0:0: cannot write file");
  out << text;
}

Loaded load(const std::string& path, bool prelude) {
  Loaded l;
  if (prelude) {
    if (const char* custom = std::getenv("SOFTEN_PRELUDE"); custom != nullptr && *custom != '\0') {
      parse_into(l.diagram, read_file(custom), custom);
    } else {
      parse_into(l.diagram, kPreludeText, std::string(kPreludeFile));
    }
  }
  l.prelude_size = l.diagram.size();
  parse_into(l.diagram, read_file(path), path);
  return l;
}

std::vector<DiagramItem> user_items(const Loaded& l) {
  return {l.diagram.items().begin() + static_cast<std::ptrdiff_t>(l.prelude_size), l.diagram.items().end()};
}

// Messages without a position get the file, with 0:0 for "whole file".
std::string located(const std::string& file, const std::string& severity, const std::string& message) {
  static const std::regex has_location(R"(^[^\s:]+:\d+:\d+: )");
  std::smatch m;
  if (std::regex_search(message, m, has_location)) return m.str() + severity + ": " + m.suffix().str();
  return file + ":0:0: " + severity + ": " + message;
}

int fail(const std::string& file, const std::string& message) {
  std::cerr << located(file, "error", message) << "\n";
  return 1;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!name.empty()) out.push_back(name);
  }
  return out;
}

int run_check(const std::string& file, bool prelude) {
  Loaded l = load(file, prelude);
  auto diagnostics = check_diagram(l.diagram);
  for (const auto& d : diagnostics) std::cerr << located(file, "error", d.to_string()) << "\n";
  return diagnostics.empty() ? 0 : 1;
}

int run_pushout(const std::string& file, bool prelude, const std::string& morph, const std::string& roots,
                const std::string& out) {
  Loaded l = load(file, prelude);
  PushoutResult r = pushout_diagram(l.diagram, morph, split_names(roots));
  for (const auto& w : r.state.warnings) std::cerr << located(file, "warning", w) << "\n";
  Diagram all = l.diagram;
  all.append(r.output);
  for (const auto& item : r.output.items()) {
    for (const auto& d : check_item(all, item)) return fail(file, d.to_string());
  }
  auto items = user_items(l);
  items.insert(items.end(), r.output.items().begin(), r.output.items().end());
  write_output(out, print_items(items));
  return 0;
}

int run_drop_params(const std::string& file, bool prelude, const std::string& out) {
  Loaded l = load(file, prelude);
  Diagram user;
  for (const auto& item : user_items(l)) user.add(item);
  PositionSet positions = choose_positions(l.diagram);
  for (auto it = positions.begin(); it != positions.end();) {
    bool local = user.contains(it->first.substr(0, it->first.find('/')));
    it = local ? std::next(it) : positions.erase(it);
  }
  Diagram result = remove_positions(l.diagram, positions);
  for (const auto& d : check_diagram(result)) return fail(file, d.to_string());
  std::vector<DiagramItem> items(result.items().begin() + static_cast<std::ptrdiff_t>(l.prelude_size),
                                 result.items().end());
  write_output(out, print_items(items));
  return 0;
}

int run_soften(const std::string& file, bool prelude, const std::string& roots, const std::string& out,
               bool witnesses) {
  Loaded l = load(file, prelude);
  SoftenResult r = soften_diagram(l.diagram, split_names(roots));
  for (const auto& d : r.report) {
    std::cerr << located(file, "note", "dropped " + d.theory + "/" + d.constant + ": " + d.reason) << "\n";
  }
  std::vector<DiagramItem> items;
  if (witnesses) items = user_items(l);
  items.insert(items.end(), r.output.items().begin(), r.output.items().end());
  if (witnesses) items.insert(items.end(), r.witnesses.items().begin(), r.witnesses.items().end());
  write_output(out, print_items(items));
  return 0;
}

int run_diff(const std::string& a, const std::string& b, bool prelude, const std::string& modulo) {
  Loaded la = load(a, prelude);
  Loaded lb = load(b, prelude);
  Diagram da;
  Diagram db;
  for (const auto& item : user_items(la)) da.add(item);
  for (const auto& item : user_items(lb)) db.add(item);
  DiffReport report = diff_diagrams(da, db, modulo == "alpha" ? Modulo::alpha : Modulo::alpha_beta);
  for (const auto& e : report.mismatches()) {
    std::cout << "mismatch " << e.item << (e.part.empty() ? "" : "/" + e.part) << "\n  < " << e.left << "\n  > "
              << e.right << "\n";
  }
  if (report.equal()) std::cout << "equal\n";
  return report.equal() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"softenlf: soften hard-typed LF libraries"};
  app.require_subcommand(1);
  bool no_prelude = false;
  app.add_flag("--no-prelude", no_prelude, "do not load Proofs/HTyped/STyped/TE/TP");

  std::string file;
  std::string file_b;
  std::string out;
  std::string morph;
  std::string roots;
  std::string modulo = "alpha-beta";
  bool witnesses = false;

  auto* check = app.add_subcommand("check", "typecheck every item");
  check->add_option("FILE", file)->required();

  auto* pushout = app.add_subcommand("pushout", "push theories along a morphism");
  pushout->add_option("FILE", file)->required();
  pushout->add_option("--morph", morph)->required();
  pushout->add_option("--roots", roots)->required();
  pushout->add_option("-o,--output", out);

  auto* drop = app.add_subcommand("drop-params", "remove unused argument positions");
  drop->add_option("FILE", file)->required();
  drop->add_option("-o,--output", out);

  auto* soft = app.add_subcommand("soften", "soften theories and morphisms over HTyped");
  soft->add_option("FILE", file)->required();
  soft->add_option("--roots", roots);
  soft->add_option("-o,--output", out);
  soft->add_flag("--emit-witnesses", witnesses, "also write TE_X and TP_X");

  auto* diff = app.add_subcommand("diff", "compare two files item by item");
  diff->add_option("A", file)->required();
  diff->add_option("B", file_b)->required();
  diff->add_option("--modulo", modulo)->check(CLI::IsMember({"alpha", "alpha-beta"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bool prelude = !no_prelude;
    if (check->parsed()) return run_check(file, prelude);
    if (pushout->parsed()) return run_pushout(file, prelude, morph, roots, out);
    if (drop->parsed()) return run_drop_params(file, prelude, out);
    if (soft->parsed()) return run_soften(file, prelude, roots, out, witnesses);
    if (diff->parsed()) return run_diff(file, file_b, prelude, modulo);
  } catch (const Error& e) {
    return fail(file, e.what());
  } catch (const std::exception& e) {
    return fail(file, std::string("internal error: ") + e.what());
  }
  return 2;
}
