#include "eprc/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

#include "CLI11.hpp"
#include "eprc/parallel.hpp"

namespace eprc::cli {

namespace {

// ---- JSON emission ---------------------------------------------------------

std::string format_double(double v) {
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Minimal streaming writer: objects one key per line, arrays inline, doubles
// with 17 significant digits. Key order is whatever the caller emits, which
// keeps reports byte-stable across runs.
class JsonWriter {
 public:
  explicit JsonWriter(std::ostream& out) : out_(out) {}

  void begin_object() { open('{'); }
  void end_object() { close(); }
  void begin_array() { open('['); }
  void end_array() { close(); }

  void key(std::string_view k) {
    separate();
    write_string(k);
    out_ << ": ";
    just_keyed_ = true;
  }

  void value(double v) {
    separate();
    out_ << format_double(v);
  }
  void value(int v) { value_integral(static_cast<long long>(v)); }
  void value(std::uint64_t v) {
    separate();
    out_ << v;
  }
  void value(std::string_view v) {
    separate();
    write_string(v);
  }

 private:
  struct Level {
    bool array;
    bool has_items;
  };

  void value_integral(long long v) {
    separate();
    out_ << v;
  }

  std::string indent() const { return std::string(2 * levels_.size(), ' '); }

  void separate() {
    if (just_keyed_) {
      just_keyed_ = false;
      return;
    }
    if (levels_.empty()) return;
    Level& l = levels_.back();
    if (l.array) {
      if (l.has_items) out_ << ", ";
    } else {
      if (l.has_items) out_ << ',';
      out_ << '\n' << indent();
    }
    l.has_items = true;
  }

  void open(char c) {
    separate();
    out_ << c;
    levels_.push_back(Level{c == '[', false});
  }

  void close() {
    const Level l = levels_.back();
    levels_.pop_back();
    if (!l.array && l.has_items) out_ << '\n' << indent();
    out_ << (l.array ? ']' : '}');
  }

  void write_string(std::string_view s) {
    out_ << '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ << "\\\""; break;
        case '\\': out_ << "\\\\"; break;
        case '\n': out_ << "\\n"; break;
        case '\t': out_ << "\\t"; break;
        case '\r': out_ << "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char esc[8];
            std::snprintf(esc, sizeof(esc), "\\u%04x", c);
            out_ << esc;
          } else {
            out_ << c;
          }
      }
    }
    out_ << '"';
  }

  std::ostream& out_;
  std::vector<Level> levels_;
  bool just_keyed_ = false;
};

void write_complex(JsonWriter& w, const Amplitude& a) {
  w.begin_array();
  w.value(a.real());
  w.value(a.imag());
  w.end_array();
}

void write_mass(JsonWriter& w, const std::vector<double>& mass) {
  w.begin_array();
  for (double m : mass) w.value(m);
  w.end_array();
}

void write_summary(JsonWriter& w, const SecondLevelSummary& s) {
  w.begin_object();
  w.key("mode_set");
  w.begin_array();
  for (int m : s.mode_set) w.value(m);
  w.end_array();
  w.key("mass_at_1_and_4");
  w.value(s.mass_at_1_and_4);
  w.key("mass_elsewhere");
  w.value(s.mass_elsewhere);
  w.key("sample_variance");
  w.value(s.sample_variance);
  w.end_object();
}

void write_config(JsonWriter& w, const RunConfig& cfg) {
  w.begin_object();
  w.key("command");
  w.value(cfg.command);
  w.key("rounds");
  w.value(cfg.rounds);
  w.key("ancilla_a");
  write_complex(w, cfg.ancilla_a);
  w.key("ancilla_b");
  write_complex(w, cfg.ancilla_b);
  if (cfg.command == "exact" || cfg.command == "simulate") {
    if (cfg.state_amplitudes) {
      w.key("state_amplitudes");
      w.begin_array();
      for (double v : *cfg.state_amplitudes) w.value(v);
      w.end_array();
    } else {
      w.key("state");
      w.value(cfg.state);
    }
  }
  if (cfg.command == "simulate" || cfg.command == "teleport") {
    w.key("trials");
    w.value(cfg.trials);
  }
  if (cfg.command == "transmit") {
    w.key("num_bits");
    w.value(cfg.num_bits);
    w.key("group_size");
    w.value(cfg.group_size);
  }
  w.key("seed");
  w.value(cfg.seed);
  w.key("format");
  w.value(cfg.format);
  w.end_object();
}

void write_results(JsonWriter& w, const Report& report) {
  w.begin_object();
  if (const auto* exact = std::get_if<ExactResult>(&report.result)) {
    w.key("rounds");
    w.value(exact->distribution.rounds());
    w.key("mass");
    write_mass(w, exact->distribution.mass());
  } else if (const auto* sim = std::get_if<SimulateResult>(&report.result)) {
    w.key("rounds");
    w.value(sim->exact.rounds());
    w.key("trials");
    w.value(sim->empirical.total);
    w.key("empirical_counts");
    w.begin_array();
    for (std::uint64_t c : sim->empirical.counts) w.value(c);
    w.end_array();
    w.key("empirical_mass");
    write_mass(w, to_distribution(sim->empirical).mass());
    w.key("exact_mass");
    write_mass(w, sim->exact.mass());
    w.key("total_variation");
    w.value(sim->tv_distance);
    w.key("chi_square");
    w.begin_object();
    w.key("statistic");
    w.value(sim->gof.statistic);
    w.key("degrees_of_freedom");
    w.value(sim->gof.degrees_of_freedom);
    w.key("p_value");
    w.value(sim->gof.p_value);
    w.end_object();
    w.key("summary");
    write_summary(w, sim->summary);
  } else if (const auto* audit = std::get_if<AuditResult>(&report.result)) {
    w.key("rounds");
    w.value(audit->report.d_computational.rounds());
    w.key("d_computational");
    write_mass(w, audit->report.d_computational.mass());
    w.key("d_diagonal");
    write_mass(w, audit->report.d_diagonal.mass());
    w.key("max_abs_difference");
    w.value(audit->report.max_abs_difference);
    w.key("sequence_distribution_difference");
    w.value(audit->report.sequence_distribution_difference);
  } else if (const auto* tx = std::get_if<TransmitResult>(&report.result)) {
    w.key("num_bits");
    w.value(static_cast<std::uint64_t>(tx->report.num_bits));
    w.key("group_size");
    w.value(static_cast<std::uint64_t>(tx->report.group_size));
    std::string sent, decoded;
    sent.reserve(tx->report.sent_bits.size());
    decoded.reserve(tx->report.decoded_bits.size());
    for (int b : tx->report.sent_bits) sent.push_back(static_cast<char>('0' + b));
    for (int b : tx->report.decoded_bits)
      decoded.push_back(static_cast<char>('0' + b));
    w.key("sent_bits");
    w.value(sent);
    w.key("decoded_bits");
    w.value(decoded);
    w.key("bit_errors");
    w.value(static_cast<std::uint64_t>(tx->report.bit_errors));
    w.key("bit_error_rate");
    w.value(tx->report.bit_error_rate);
    w.key("ci_level");
    w.value(0.95);
    w.key("ci_low");
    w.value(tx->report.ci_low);
    w.key("ci_high");
    w.value(tx->report.ci_high);
  } else if (const auto* tp = std::get_if<TeleportResult>(&report.result)) {
    w.key("trials");
    w.value(tp->trials);
    w.key("min_fidelity");
    w.value(tp->min_fidelity);
    w.key("mean_fidelity");
    w.value(tp->mean_fidelity);
    w.key("max_fidelity");
    w.value(tp->max_fidelity);
  }
  w.end_object();
}

void emit_json(const Report& report, std::ostream& out) {
  JsonWriter w(out);
  w.begin_object();
  w.key("command");
  w.value(report.config.command);
  w.key("tool_version");
  w.value(std::string_view(kToolVersion));
  w.key("seed");
  w.value(report.config.seed);
  w.key("config");
  write_config(w, report.config);
  w.key("results");
  write_results(w, report);
  w.end_object();
  out << '\n';
}

// ---- CSV emission ----------------------------------------------------------

const char* basis_name(BasisChoice basis) {
  return basis == BasisChoice::Computational ? "computational" : "diagonal";
}

void emit_csv(const Report& report, std::ostream& out) {
  out << "trial_index,alice_basis,alice_outcome,outcomes,zero_count\n";
  if (const auto* sim = std::get_if<SimulateResult>(&report.result)) {
    const int rounds = sim->exact.rounds();
    for (std::size_t i = 0; i < sim->trial_zero_counts.size(); ++i) {
      out << i << ",,,";
      for (int r = 0; r < rounds; ++r)
        out << static_cast<char>('0' + ((sim->trial_outcomes[i] >> r) & 1u));
      out << ',' << static_cast<int>(sim->trial_zero_counts[i]) << '\n';
    }
  } else if (const auto* tx = std::get_if<TransmitResult>(&report.result)) {
    std::size_t index = 0;
    for (const GroupRecord& group : tx->report.groups) {
      for (const TrialRecord& trial : group.trials) {
        out << index++ << ',' << basis_name(trial.alice_basis) << ','
            << trial.alice_outcome << ',';
        for (int o : trial.bob_outcomes) out << static_cast<char>('0' + o);
        out << ',' << trial.bob_zero_count << '\n';
      }
    }
  } else {
    throw std::invalid_argument(
        "csv output is only available for simulate and transmit");
  }
}

// ---- Argument parsing ------------------------------------------------------

struct RawOpts {
  int rounds = 5;
  std::string ancilla = "1,2";
  std::uint64_t seed = 1;
  std::string format = "json";
  std::string out;
  std::string state = "0";
  std::string amp;
  std::uint64_t trials = 0;  // 0 = not given, filled per command
  std::uint64_t group_size = 10;
  std::uint64_t num_bits = 1000;
};

std::vector<double> parse_csv_doubles(const std::string& text,
                                      const std::string& flag) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos
                                                    : comma - pos);
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || token.empty() || !std::isfinite(v))
      throw std::invalid_argument(flag + ": cannot parse '" + token +
                                  "' as a real number");
    values.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return values;
}

void add_shared_options(CLI::App* cmd, RawOpts& raw) {
  cmd->add_option("--rounds", raw.rounds, "Cascade rounds k")
      ->check(CLI::Range(1, 62))
      ->capture_default_str();
  cmd->add_option("--ancilla", raw.ancilla,
                  "Ancilla amplitudes 'a,b' (reals) or 'are,aim,bre,bim'; "
                  "normalized after parsing")
      ->capture_default_str();
  cmd->add_option("--seed", raw.seed, "Master seed (64-bit)")
      ->capture_default_str();
  cmd->add_option("--format", raw.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  cmd->add_option("--out", raw.out, "Write the report to PATH");
}

void add_state_options(CLI::App* cmd, RawOpts& raw) {
  auto* state =
      cmd->add_option("--state", raw.state, "Named input state")
          ->check(CLI::IsMember({"0", "1", "+", "-"}))
          ->capture_default_str();
  cmd->add_option("--amp", raw.amp,
                  "Explicit input amplitudes a0r,a0i,a1r,a1i; normalized")
      ->excludes(state);
}

void build_app(CLI::App& app, RawOpts& raw) {
  app.description(
      "Exact and Monte Carlo simulator for EPR-pair CNOT-cascade "
      "basis discrimination");
  app.require_subcommand(1);

  CLI::App* exact = app.add_subcommand(
      "exact", "Exact zero-count law of the cascade for an input state");
  add_shared_options(exact, raw);
  add_state_options(exact, raw);

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo cascade trials with goodness of fit");
  add_shared_options(simulate, raw);
  add_state_options(simulate, raw);
  simulate
      ->add_option("--trials", raw.trials, "Number of cascade runs [100000]")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32));

  CLI::App* audit = app.add_subcommand(
      "audit", "Compare Bob's exact statistics across Alice's two bases");
  add_shared_options(audit, raw);

  CLI::App* transmit = app.add_subcommand(
      "transmit", "End-to-end classical-bit transmission experiment");
  add_shared_options(transmit, raw);
  transmit->add_option("--bits", raw.num_bits, "Bits to send")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32))
      ->capture_default_str();
  transmit
      ->add_option("--group-size", raw.group_size, "EPR pairs per bit")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32))
      ->capture_default_str();

  CLI::App* teleport = app.add_subcommand(
      "teleport", "Teleportation-with-classical-channel fidelity sweep");
  add_shared_options(teleport, raw);
  teleport
      ->add_option("--trials", raw.trials, "Random input states [100]")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 32));
}

RunConfig finalize_config(const std::string& command, const RawOpts& raw) {
  RunConfig cfg;
  cfg.command = command;
  cfg.rounds = raw.rounds;

  const std::vector<double> anc = parse_csv_doubles(raw.ancilla, "--ancilla");
  Amplitude a, b;
  if (anc.size() == 2) {
    a = Amplitude(anc[0], 0.0);
    b = Amplitude(anc[1], 0.0);
  } else if (anc.size() == 4) {
    a = Amplitude(anc[0], anc[1]);
    b = Amplitude(anc[2], anc[3]);
  } else {
    throw std::invalid_argument(
        "--ancilla expects 'a,b' or 'are,aim,bre,bim'");
  }
  const AncillaSpec spec = AncillaSpec::from_unnormalized(a, b);
  cfg.ancilla_a = spec.a();
  cfg.ancilla_b = spec.b();

  cfg.state = raw.state;
  if (!raw.amp.empty()) {
    const std::vector<double> amp = parse_csv_doubles(raw.amp, "--amp");
    if (amp.size() != 4)
      throw std::invalid_argument("--amp expects a0r,a0i,a1r,a1i");
    cfg.state_amplitudes = {amp[0], amp[1], amp[2], amp[3]};
  }

  cfg.trials = raw.trials != 0 ? raw.trials
                               : (command == "teleport" ? 100 : 100000);
  cfg.group_size = raw.group_size;
  cfg.num_bits = raw.num_bits;
  cfg.seed = raw.seed;
  cfg.format = raw.format;
  cfg.output_path = raw.out;

  if (cfg.format == "csv" && command != "simulate" && command != "transmit")
    throw std::invalid_argument(
        "--format csv is only available for simulate and transmit");
  return cfg;
}

std::string parsed_command(const CLI::App& app) {
  const auto subs = app.get_subcommands();
  if (subs.size() != 1)
    throw std::invalid_argument("expected exactly one subcommand");
  return subs.front()->get_name();
}

}  // namespace

RunConfig parse_config(const std::vector<std::string>& args) {
  RawOpts raw;
  CLI::App app{"", "epr_cascade"};
  build_app(app, raw);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(std::string("argument error: ") + e.what());
  }
  return finalize_config(parsed_command(app), raw);
}

PureState input_state(const RunConfig& cfg) {
  if (cfg.state_amplitudes) {
    const auto& v = *cfg.state_amplitudes;
    Amplitude a0(v[0], v[1]), a1(v[2], v[3]);
    const double n2 = std::norm(a0) + std::norm(a1);
    if (!std::isfinite(n2) || n2 < 1e-12)
      throw std::invalid_argument("--amp: amplitudes have ~zero norm");
    if (std::abs(n2 - 1.0) > kExactTol) {
      const double s = 1.0 / std::sqrt(n2);
      a0 *= s;
      a1 *= s;
    }
    return PureState(1, {a0, a1});
  }
  if (cfg.state == "0") return ket_zero();
  if (cfg.state == "1") return ket_one();
  if (cfg.state == "+") return ket_plus();
  if (cfg.state == "-") return ket_minus();
  throw std::invalid_argument("unknown state name '" + cfg.state + "'");
}

Report run_command(const RunConfig& cfg) {
  const CascadeConfig cascade{cfg.rounds,
                              AncillaSpec(cfg.ancilla_a, cfg.ancilla_b)};
  const RngStream master(cfg.seed);

  if (cfg.command == "exact") {
    return Report{cfg,
                  ExactResult{exact_count_distribution(
                      DensityOperator::from_pure(input_state(cfg)), cascade)}};
  }

  if (cfg.command == "simulate") {
    const PureState input = input_state(cfg);
    const CountDistribution exact = exact_count_distribution(
        DensityOperator::from_pure(input), cascade);
    const std::size_t n = cfg.trials;
    std::vector<std::uint8_t> zero_counts(n);
    std::vector<std::uint32_t> outcome_bits(n);
    parallel_for(n, resolve_thread_count(), [&](std::size_t i) {
      RngStream stream = master.substream(i);
      const CascadeResult res = run_cascade(input, cascade, stream);
      zero_counts[i] = static_cast<std::uint8_t>(res.zero_count);
      std::uint32_t bits = 0;
      for (std::size_t r = 0; r < res.outcomes.size(); ++r)
        bits |= static_cast<std::uint32_t>(res.outcomes[r]) << r;
      outcome_bits[i] = bits;
    });
    const std::vector<int> samples(zero_counts.begin(), zero_counts.end());
    EmpiricalDistribution emp = empirical_distribution(samples, cfg.rounds);
    const double tv = total_variation(to_distribution(emp), exact);
    HypothesisTestResult gof = chi_square_gof(emp, exact);
    SecondLevelSummary summary = second_level_summary(emp);
    return Report{cfg, SimulateResult{exact, std::move(emp), tv, gof,
                                      std::move(summary),
                                      std::move(zero_counts),
                                      std::move(outcome_bits)}};
  }

  if (cfg.command == "audit")
    return Report{cfg, AuditResult{no_signaling_audit(cascade)}};

  if (cfg.command == "transmit")
    return Report{cfg, TransmitResult{run_transmission_experiment(
                           cfg.num_bits, cfg.group_size, cascade, master,
                           resolve_thread_count())}};

  if (cfg.command == "teleport") {
    double min_f = 1.0, max_f = 0.0, sum_f = 0.0;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      RngStream stream = master.substream(t);
      const PureState input = random_state(1, stream);
      const double f = teleport_with_ccc(input, stream);
      min_f = std::min(min_f, f);
      max_f = std::max(max_f, f);
      sum_f += f;
    }
    return Report{cfg, TeleportResult{cfg.trials, min_f,
                                      sum_f / static_cast<double>(cfg.trials),
                                      max_f}};
  }

  throw std::invalid_argument("unknown command '" + cfg.command + "'");
}

void emit_report(const Report& report, std::ostream& out) {
  if (report.config.format == "csv")
    emit_csv(report, out);
  else
    emit_json(report, out);
}

std::string report_to_string(const Report& report) {
  std::ostringstream buf;
  emit_report(report, buf);
  return buf.str();
}

int exit_code_for_exception(const std::exception& e) {
  if (dynamic_cast<const invariant_error*>(&e)) return 2;
  if (dynamic_cast<const branch_budget_error*>(&e)) return 1;
  if (dynamic_cast<const io_error*>(&e)) return 1;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 1;
  if (dynamic_cast<const std::out_of_range*>(&e)) return 1;
  return 2;
}

int main_entry(int argc, const char* const* argv) {
  RawOpts raw;
  CLI::App app{"", "epr_cascade"};
  build_app(app, raw);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    const RunConfig cfg = finalize_config(parsed_command(app), raw);
    const Report report = run_command(cfg);
    const std::string text = report_to_string(report);
    if (cfg.output_path.empty()) {
      std::cout << text;
      if (!std::cout.good()) throw io_error("failed writing to stdout");
    } else {
      std::ofstream file(cfg.output_path, std::ios::binary);
      if (!file) throw io_error("cannot open '" + cfg.output_path + "'");
      file << text;
      file.close();
      if (!file.good())
        throw io_error("failed writing '" + cfg.output_path + "'");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for_exception(e);
  }
  return 0;
}

}  // namespace eprc::cli
