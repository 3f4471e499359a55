#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "resprod/errors.hpp"
#include "resprod/formula.hpp"
#include "resprod/fv.hpp"
#include "resprod/rprod.hpp"
#include "resprod/tarski_qe.hpp"

using namespace resprod;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Formulas may be given inline or in a file; exactly one source.
std::string pick_text(const std::string& flag, const std::string& text,
                      const std::string& file) {
  if (text.empty() == file.empty())
    throw std::runtime_error("exactly one of --" + flag + " and --" + flag +
                             "-file is required");
  return text.empty() ? slurp(file) : text;
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

bool quantifier_free(const RingFormula& f) {
  switch (f.kind()) {
    case RingFormula::Kind::Eq:
      return true;
    case RingFormula::Kind::Not:
      return quantifier_free(f.sub());
    case RingFormula::Kind::And:
    case RingFormula::Kind::Or:
    case RingFormula::Kind::Implies:
      return quantifier_free(f.lhs()) && quantifier_free(f.rhs());
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"restricted products of finite connected rings: reduction, "
               "decision, evaluation"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "output format: text or structured")
      ->check(CLI::IsMember({"text", "structured"}));
  auto structured = [&format] { return format == "structured"; };
  int rc = 0;

  auto* reduce_cmd =
      app.add_subcommand("reduce", "reduce a ring formula over a restricting formula");
  reduce_cmd->fallthrough();
  std::string red_phi, red_formula, red_formula_file;
  std::size_t red_cap = 4096;
  reduce_cmd->add_option("--phi", red_phi, "restricting formula (one free variable)")
      ->required();
  reduce_cmd->add_option("--formula", red_formula, "ring formula");
  reduce_cmd->add_option("--formula-file", red_formula_file, "file holding the ring formula");
  reduce_cmd->add_option("--max-cells", red_cap, "cell cap (default 4096)");
  reduce_cmd->callback([&] {
    RingFormula theta =
        parse_ring_formula(pick_text("formula", red_formula, red_formula_file));
    ReduceOptions opt;
    opt.max_cells = red_cap;
    ReductionResult r = reduce(theta, parse_ring_formula(red_phi), opt);
    if (!structured()) {
      std::cout << render(r);
      return;
    }
    for (std::size_t i = 0; i < r.cells.cells.size(); ++i)
      std::cout << "cell." << i << "=" << render(r.cells.cells[i]) << "\n";
    std::cout << "psi=" << render(r.psi) << "\n";
    for (std::size_t i = 0; i < r.trace.size(); ++i)
      std::cout << "trace." << i << "=" << r.trace[i] << "\n";
  });

  auto* decide_cmd =
      app.add_subcommand("decide", "decide a ring sentence in a model");
  decide_cmd->fallthrough();
  std::string dec_model, dec_sentence, dec_sentence_file;
  std::size_t dec_cap = 4096;
  decide_cmd->add_option("--model", dec_model, "model configuration file")->required();
  decide_cmd->add_option("--sentence", dec_sentence, "ring sentence");
  decide_cmd->add_option("--sentence-file", dec_sentence_file, "file holding the sentence");
  decide_cmd->add_option("--max-cells", dec_cap, "cell cap (default 4096)");
  decide_cmd->callback([&] {
    RPModel m = parse_model_config(slurp(dec_model));
    RingFormula theta =
        parse_ring_formula(pick_text("sentence", dec_sentence, dec_sentence_file));
    bool v = decide_in_model(m, theta, dec_cap);
    std::cout << (structured() ? "verdict=" : "") << bool_str(v) << "\n";
  });

  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate a ring formula at model elements");
  eval_cmd->fallthrough();
  std::string ev_model, ev_formula, ev_formula_file;
  std::vector<std::string> ev_args;
  std::size_t ev_cap = 4096;
  eval_cmd->add_option("--model", ev_model, "model configuration file")->required();
  eval_cmd->add_option("--formula", ev_formula, "ring formula");
  eval_cmd->add_option("--formula-file", ev_formula_file, "file holding the formula");
  eval_cmd->add_option("--arg", ev_args,
                       "element literal bound to the next free variable in "
                       "sorted order (repeatable)");
  eval_cmd->add_option("--max-cells", ev_cap, "cell cap (default 4096)");
  eval_cmd->callback([&] {
    RPModel m = parse_model_config(slurp(ev_model));
    RingFormula theta =
        parse_ring_formula(pick_text("formula", ev_formula, ev_formula_file));
    std::vector<RPElement> elems;
    elems.reserve(ev_args.size());
    for (const std::string& lit : ev_args) elems.push_back(parse_element(m, lit));
    bool v = evaluate_in_model(m, theta, elems, ev_cap);
    std::cout << (structured() ? "verdict=" : "") << bool_str(v) << "\n";
  });

  auto* qe_cmd =
      app.add_subcommand("qe", "eliminate quantifiers from a Boolean formula");
  qe_cmd->fallthrough();
  std::string qe_formula, qe_formula_file;
  qe_cmd->add_option("--formula", qe_formula, "Boolean formula");
  qe_cmd->add_option("--formula-file", qe_formula_file, "file holding the formula");
  qe_cmd->callback([&] {
    BoolFormula f = parse_bool_formula(pick_text("formula", qe_formula, qe_formula_file));
    std::cout << (structured() ? "formula=" : "") << render(eliminate_quantifiers(f))
              << "\n";
  });

  auto* bdecide_cmd =
      app.add_subcommand("bdecide", "decide a Boolean sentence");
  bdecide_cmd->fallthrough();
  std::string b_sentence, b_sentence_file;
  bdecide_cmd->add_option("--sentence", b_sentence, "Boolean sentence");
  bdecide_cmd->add_option("--sentence-file", b_sentence_file, "file holding the sentence");
  bdecide_cmd->callback([&] {
    BoolFormula f =
        parse_bool_formula(pick_text("sentence", b_sentence, b_sentence_file));
    std::cout << (structured() ? "verdict=" : "") << bool_str(decide_sentence(f)) << "\n";
  });

  auto* ax_cmd =
      app.add_subcommand("check-axioms", "run the axiom checks against a model");
  ax_cmd->fallthrough();
  std::string ax_model;
  std::size_t ax_samples = 100;
  std::uint64_t ax_seed = 1729;
  ax_cmd->add_option("--model", ax_model, "model configuration file")->required();
  ax_cmd->add_option("--samples", ax_samples, "samples per check (default 100)");
  ax_cmd->add_option("--seed", ax_seed, "random seed (default 1729)");
  ax_cmd->callback([&] {
    RPModel m = parse_model_config(slurp(ax_model));
    AxiomReport rep = check_axioms(m, ax_samples, ax_seed);
    if (!structured()) {
      std::cout << rep.render();
    } else {
      for (std::size_t i = 0; i < rep.checks.size(); ++i) {
        std::cout << "check." << i << ".axiom=" << rep.checks[i].axiom << "\n";
        std::cout << "check." << i << ".passed=" << bool_str(rep.checks[i].passed) << "\n";
        std::cout << "check." << i << ".detail=" << rep.checks[i].detail << "\n";
      }
      std::cout << "all=" << bool_str(rep.all_passed()) << "\n";
    }
    if (!rep.all_passed()) rc = 1;
  });

  auto* oracle_cmd = app.add_subcommand(
      "oracle", "compare the reduction pipeline with the direct decision");
  oracle_cmd->fallthrough();
  std::string or_model, or_sentence, or_sentence_file;
  std::size_t or_cap = 4096;
  oracle_cmd->add_option("--model", or_model, "model configuration file")->required();
  oracle_cmd->add_option("--sentence", or_sentence, "ring sentence");
  oracle_cmd->add_option("--sentence-file", or_sentence_file, "file holding the sentence");
  oracle_cmd->add_option("--max-cells", or_cap, "cell cap (default 4096)");
  oracle_cmd->callback([&] {
    RPModel m = parse_model_config(slurp(or_model));
    RingFormula theta =
        parse_ring_formula(pick_text("sentence", or_sentence, or_sentence_file));
    bool pipeline = decide_in_model(m, theta, or_cap);
    std::optional<bool> direct;
    RingFormula body = theta;
    bool any_e = false, any_a = false;
    while (body.kind() == RingFormula::Kind::Exists ||
           body.kind() == RingFormula::Kind::Forall) {
      (body.kind() == RingFormula::Kind::Exists ? any_e : any_a) = true;
      body = body.body();
    }
    if (quantifier_free(body)) {
      if (!any_a)
        direct = sigma1_decide(m, theta);
      else if (!any_e)
        direct = pi1_decide(m, theta);
    }
    bool agree = !direct || *direct == pipeline;
    if (!structured()) {
      std::cout << "pipeline: " << bool_str(pipeline) << "\n";
      std::cout << "direct: " << (direct ? bool_str(*direct) : "not applicable") << "\n";
      std::cout << "agree: " << (direct ? (agree ? "yes" : "no") : "n/a") << "\n";
    } else {
      std::cout << "pipeline=" << bool_str(pipeline) << "\n";
      std::cout << "direct=" << (direct ? bool_str(*direct) : "n/a") << "\n";
      std::cout << "agree=" << bool_str(agree) << "\n";
    }
    if (!agree) rc = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ResourceLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
