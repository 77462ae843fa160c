// Copyright 2026 The sqm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sqm: loudness, sharpness, roughness and fluctuation strength of WAV files
// or generated stimuli, evaluation grids and pipeline dumps.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqm/analyzer.hpp"
#include "sqm/audio_io.hpp"
#include "sqm/eval.hpp"
#include "sqm/modulation.hpp"
#include "sqm/stimuli.hpp"

namespace {

using nlohmann::ordered_json;

struct RunConfig {
  std::string fb = "gt";
  double fullscale_db = sqm::kDefaultFullScaleDb;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 1;
  std::string field = "free";
  std::string ear_table;
  std::string loudness_table;
  std::string roughness_weights;
  bool quiet = false;
};

struct InputConfig {
  std::string file;
  std::string sine, am, fm, noise;
  double spl = 60.0;
  double duration = 1.0;
  double rate = sqm::kDefaultSampleRate;
  double target_sone = 0.0;
};

std::string env_or(const std::string& flag, const char* var) {
  if (!flag.empty()) return flag;
  const char* v = std::getenv(var);
  return v != nullptr ? std::string(v) : std::string();
}

sqm::SoundField parse_field(const std::string& s) {
  if (s == "free") return sqm::SoundField::kFree;
  if (s == "diffuse") return sqm::SoundField::kDiffuse;
  throw std::invalid_argument("unknown sound field: " + s + " (expected free or diffuse)");
}

sqm::AnalyzerOptions analyzer_options(const RunConfig& cfg, sqm::FilterbankKind kind) {
  auto o = sqm::AnalyzerOptions::defaults(kind);
  const sqm::SoundField field = parse_field(cfg.field);
  const std::string ear = env_or(cfg.ear_table, "SQM_EAR_TABLE");
  o.loudness.ear = ear.empty() ? sqm::EarTransferTable::for_field(field)
                               : sqm::load_ear_table(ear, field);
  const std::string table = env_or(cfg.loudness_table, "SQM_LOUDNESS_TABLE");
  if (!table.empty()) o.loudness.table = sqm::load_loudness_table(table);
  const std::string weights = env_or(cfg.roughness_weights, "SQM_ROUGHNESS_WEIGHTS");
  if (!weights.empty()) o.roughness.weights = sqm::load_roughness_weights(weights);
  return o;
}

std::vector<double> split_numbers(const std::string& s, std::size_t min_count,
                                  std::size_t max_count, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number '" + item + "' in " + what);
    }
  }
  if (out.size() < min_count || out.size() > max_count) {
    throw std::invalid_argument("wrong number of fields in " + what + ": '" + s + "'");
  }
  return out;
}

sqm::CalibratedSignal load_input(const InputConfig& in, const RunConfig& cfg) {
  const int sources = !in.file.empty() + !in.sine.empty() + !in.am.empty() + !in.fm.empty() +
                      !in.noise.empty();
  if (sources != 1) {
    throw std::invalid_argument(
        "give exactly one input: a WAV path, --sine, --am, --fm or --noise");
  }
  if (!in.file.empty()) {
    if (!std::filesystem::exists(in.file)) {
      throw std::runtime_error("input file not found: " + in.file);
    }
    return sqm::read_wav(in.file, cfg.fullscale_db);
  }
  sqm::StimulusSpec s;
  s.duration_s = in.duration;
  s.level_db_spl = in.spl;
  s.sample_rate = in.rate;
  s.seed = cfg.seed;
  if (!in.sine.empty()) {
    const auto v = split_numbers(in.sine, 2, 2, "--sine F:SPL");
    s.kind = sqm::StimulusKind::kSine;
    s.carrier_hz = v[0];
    s.level_db_spl = v[1];
  } else if (!in.am.empty()) {
    const auto v = split_numbers(in.am, 3, 3, "--am C:FM:DEPTH");
    s.kind = sqm::StimulusKind::kAm;
    s.carrier_hz = v[0];
    s.mod_freq_hz = v[1];
    s.mod_depth = v[2];
  } else if (!in.fm.empty()) {
    const auto v = split_numbers(in.fm, 3, 3, "--fm C:FM:DEV");
    s.kind = sqm::StimulusKind::kFm;
    s.carrier_hz = v[0];
    s.mod_freq_hz = v[1];
    s.freq_deviation_hz = v[2];
  } else {
    const auto colon = in.noise.find(':');
    const std::string type = in.noise.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : in.noise.substr(colon + 1);
    if (type == "nb") {
      const auto v = split_numbers(rest, 1, 2, "--noise nb:CENTER[:BW]");
      s.kind = sqm::StimulusKind::kNbNoise;
      s.center_hz = v[0];
      s.bandwidth_hz = v.size() > 1 ? v[1] : sqm::critical_bandwidth(v[0]);
    } else if (type == "hp") {
      const auto v = split_numbers(rest, 1, 2, "--noise hp:LOW[:HIGH]");
      s.kind = sqm::StimulusKind::kHpNoise;
      s.low_cut_hz = v[0];
      s.high_cut_hz = v.size() > 1 ? v[1] : 10000.0;
    } else if (type == "lp") {
      const auto v = split_numbers(rest, 1, 2, "--noise lp:HIGH[:LOW]");
      s.kind = sqm::StimulusKind::kLpNoise;
      s.high_cut_hz = v[0];
      s.low_cut_hz = v.size() > 1 ? v[1] : 200.0;
    } else {
      throw std::invalid_argument("unknown noise type '" + type + "' (expected nb, hp or lp)");
    }
  }
  return sqm::generate(s);
}

// Writes to --out or stdout.
void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write output file: " + cfg.out);
  f << text;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write output file: " + path);
  f << text;
}

std::string series_csv(const sqm::MetricSeries& m, const std::string& name) {
  std::ostringstream o;
  o << "t," << name << '\n';
  for (std::size_t i = 0; i < m.series.size(); ++i) {
    o << sqm::format_number(m.start_s + i / m.sample_rate) << ','
      << sqm::format_number(m.series[i]) << '\n';
  }
  return o.str();
}

std::string per_channel_csv(const sqm::MetricSeries& m, const sqm::ChannelGrid& grid) {
  std::ostringstream o;
  o << "k,cam,value\n";
  for (std::size_t k = 0; k < m.per_channel.size(); ++k) {
    o << k << ',' << sqm::format_number(grid.cam(k)) << ','
      << sqm::format_number(m.per_channel[k]) << '\n';
  }
  return o.str();
}

// Long-format dump of a bank, keeping every `stride`-th sample.
std::string bank_csv(const sqm::ChannelBank& bank, std::size_t first_sample, std::size_t stride) {
  std::ostringstream o;
  o << "t,k,cam,value\n";
  for (std::size_t t = 0; t < bank.length(); t += stride) {
    const std::string ts = sqm::format_number((first_sample + t) / bank.sample_rate());
    for (std::size_t k = 0; k < bank.channels(); ++k) {
      o << ts << ',' << k << ',' << sqm::format_number(bank.grid().cam(k)) << ','
        << sqm::format_number(bank[k][t]) << '\n';
    }
  }
  return o.str();
}

std::string dump_stage(const std::string& stage, const sqm::Analyzer& a,
                       const sqm::CalibratedSignal& signal, sqm::Metric metric,
                       std::size_t stride) {
  if (stage == "channels") return bank_csv(a.model().channels(signal), 0, stride);
  if (stage == "excitation") return bank_csv(a.model().excitation(signal), 0, stride);
  const sqm::LoudnessResult n = a.loudness(signal);
  if (stage == "specific-loudness") return bank_csv(n.specific, 0, stride);
  if (stage != "bandpassed" && stage != "envelopes" && stage != "correlations") {
    throw std::invalid_argument("unknown dump stage: " + stage);
  }
  const auto settings = metric == sqm::Metric::kFluctuation
                            ? sqm::ModulationSettings::fluctuation()
                            : sqm::ModulationSettings::roughness();
  const std::size_t begin = n.steady_begin;
  const sqm::ChannelBank window = n.specific.slice(begin, n.specific.length() - begin);
  const sqm::BandLimitedBank bp = sqm::bandpass_bank(window, settings);
  if (stage == "bandpassed") return bank_csv(bp.bandpassed, begin, stride);
  if (stage == "correlations") {
    const sqm::CorrelationSet c = sqm::correlation_set(bp.bandpassed, settings);
    std::ostringstream o;
    o << "k,cam,i_k,i_k_minus_10,factor\n";
    for (std::size_t k = 0; k < c.channels(); ++k) {
      o << k << ',' << sqm::format_number(window.grid().cam(k)) << ','
        << (c.has_upper(k) ? sqm::format_number(c.upper(k)) : "") << ','
        << (c.has_lower(k) ? sqm::format_number(c.lower(k)) : "") << ','
        << sqm::format_number(c.factor(k)) << '\n';
    }
    return o.str();
  }
  const sqm::SonePhonMap& map = a.sone_phon_map();
  sqm::EnvelopeDetector detector(window.length(), window.sample_rate(),
                                 settings.envelope_cutoff_hz, settings.envelope_order);
  std::ostringstream o;
  o << "t,k,cam,upper_phon,lower_phon\n";
  std::vector<std::vector<double>> env(window.channels());
  for (std::size_t k = 0; k < env.size(); ++k) env[k] = detector(bp.bandpassed[k]);
  for (std::size_t t = 0; t < window.length(); t += stride) {
    const std::string ts = sqm::format_number((begin + t) / window.sample_rate());
    for (std::size_t k = 0; k < env.size(); ++k) {
      const double up = map.phon(env[k][t]);
      o << ts << ',' << k << ',' << sqm::format_number(window.grid().cam(k)) << ','
        << sqm::format_number(up) << ',' << sqm::format_number(-up) << '\n';
    }
  }
  return o.str();
}

void add_common(CLI::App* app, RunConfig& cfg) {
  app->add_option("--fb", cfg.fb, "Filterbank variant")->check(CLI::IsMember({"gt", "gc"}));
  app->add_option("--fullscale-db", cfg.fullscale_db, "dB SPL of a full-scale WAV sinusoid");
  app->add_option("--out", cfg.out, "Output path (default: stdout)");
  app->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--seed", cfg.seed, "Noise seed");
  app->add_option("--field", cfg.field, "Sound field of the ear table")
      ->check(CLI::IsMember({"free", "diffuse"}));
  app->add_option("--ear-table", cfg.ear_table, "Ear transfer table (env SQM_EAR_TABLE)");
  app->add_option("--loudness-table", cfg.loudness_table,
                  "G/A/alpha/E_THRQ table (env SQM_LOUDNESS_TABLE)");
  app->add_option("--roughness-weights", cfg.roughness_weights,
                  "Roughness weight table (env SQM_ROUGHNESS_WEIGHTS)");
  app->add_flag("-q,--quiet", cfg.quiet, "No progress on stderr");
}

void add_input(CLI::App* app, InputConfig& in) {
  app->add_option("input", in.file, "Mono WAV file");
  app->add_option("--sine", in.sine, "Sine F:SPL");
  app->add_option("--am", in.am, "AM tone C:FM:DEPTH (level from --spl)");
  app->add_option("--fm", in.fm, "FM tone C:FM:DEV (level from --spl)");
  app->add_option("--noise", in.noise, "Noise nb:CENTER[:BW], hp:LOW[:HIGH] or lp:HIGH[:LOW]");
  app->add_option("--spl", in.spl, "Level of generated AM/FM/noise stimuli in dB SPL");
  app->add_option("--duration", in.duration, "Duration of generated stimuli in seconds");
  app->add_option("--rate", in.rate, "Sample rate of generated stimuli");
  app->add_option("--target-sone", in.target_sone, "Rescale the input to this loudness first");
}

int run_metric(sqm::Metric metric, const RunConfig& cfg, const InputConfig& in,
               const std::string& series_out, const std::string& channels_out,
               const std::string& dump, const std::string& dump_out, std::size_t stride) {
  sqm::CalibratedSignal signal = load_input(in, cfg);
  const sqm::FilterbankKind kind = sqm::parse_filterbank(cfg.fb);
  const sqm::Analyzer a(analyzer_options(cfg, kind), signal.sample_rate());
  if (in.target_sone > 0.0) {
    signal = sqm::scale_to_loudness(signal, in.target_sone, [&](const sqm::CalibratedSignal& x) {
      return a.loudness(x).mean;
    });
  }
  if (!dump.empty()) {
    write_file(dump_out.empty() ? dump + ".csv" : dump_out,
               dump_stage(dump, a, signal, metric, stride));
  }
  const sqm::MetricSeries m = a.compute(metric, signal);
  const std::string name = sqm::to_string(metric);
  if (!series_out.empty()) write_file(series_out, series_csv(m, name));
  if (!channels_out.empty()) write_file(channels_out, per_channel_csv(m, a.model().grid()));
  if (cfg.format == "json") {
    ordered_json j;
    j["metric"] = name;
    j["filterbank"] = cfg.fb;
    j["value"] = m.value;
    j["unit"] = m.unit;
    j["spl_db"] = signal.spl_db();
    j["duration_s"] = signal.duration_s();
    emit(cfg, j.dump(2) + "\n");
  } else {
    std::ostringstream o;
    o << "metric,filterbank,value,unit\n"
      << name << ',' << cfg.fb << ',' << sqm::format_number(m.value) << ',' << m.unit << '\n';
    emit(cfg, o.str());
  }
  return 0;
}

std::string eval_json(const sqm::EvalResult& r) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < r.spec.points.size(); ++i) {
    ordered_json row;
    for (std::size_t c = 0; c < r.spec.columns.size(); ++c) {
      row[r.spec.columns[c]] = r.spec.points[i].labels[c];
    }
    row["gt_value"] = r.gt[i];
    row["gc_value"] = r.gc[i];
    rows.push_back(row);
  }
  ordered_json j;
  j["grid"] = sqm::to_string(r.spec.grid);
  j["metric"] = sqm::to_string(r.spec.metric);
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

int run_eval(const RunConfig& cfg, const std::string& grid_name, const std::string& out_dir,
             const sqm::EvalDurations& dur) {
  std::vector<sqm::EvalGrid> grids;
  if (grid_name == "all") {
    grids.assign(sqm::kAllEvalGrids.begin(), sqm::kAllEvalGrids.end());
  } else {
    grids.push_back(sqm::parse_eval_grid(grid_name));
  }
  if (grids.size() > 1 && out_dir.empty()) {
    throw std::invalid_argument("eval all needs --out-dir");
  }
  const sqm::Analyzer gt(analyzer_options(cfg, sqm::FilterbankKind::kGammatone));
  const sqm::Analyzer gc(analyzer_options(cfg, sqm::FilterbankKind::kGammachirp));
  for (sqm::EvalGrid g : grids) {
    const auto spec = sqm::eval_grid_spec(g, dur, cfg.seed);
    const auto progress = [&](sqm::FilterbankKind k, std::size_t i, std::size_t n) {
      if (!cfg.quiet) {
        std::cerr << sqm::to_string(g) << ' ' << sqm::short_name(k) << ' ' << i + 1 << '/' << n
                  << '\n';
      }
    };
    const sqm::EvalResult r = sqm::run_eval(spec, gt, gc, progress);
    const std::string text = cfg.format == "json" ? eval_json(r) : r.to_csv();
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      write_file((std::filesystem::path(out_dir) / (std::string(sqm::to_string(g)) + "." +
                                                    cfg.format)).string(),
                 text);
    } else {
      emit(cfg, text);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loudness and sound-quality metrics with gammatone/gammachirp filterbanks"};
  app.require_subcommand(1);
  RunConfig cfg;
  InputConfig in;
  std::string series_out, channels_out, dump, dump_out, grid, out_dir;
  std::size_t stride = 1;
  sqm::EvalDurations dur;

  std::vector<std::pair<CLI::App*, sqm::Metric>> metric_cmds;
  for (sqm::Metric m : {sqm::Metric::kLoudness, sqm::Metric::kSharpness,
                        sqm::Metric::kRoughness, sqm::Metric::kFluctuation}) {
    CLI::App* sub = app.add_subcommand(sqm::to_string(m), std::string("Compute ") +
                                                             sqm::to_string(m));
    add_common(sub, cfg);
    add_input(sub, in);
    sub->add_option("--series-out", series_out, "Write the time series as CSV");
    sub->add_option("--channels-out", channels_out, "Write per-channel values as CSV");
    sub->add_option("--dump", dump, "Also dump a pipeline stage")
        ->check(CLI::IsMember({"channels", "excitation", "specific-loudness", "bandpassed",
                               "envelopes", "correlations"}));
    sub->add_option("--dump-out", dump_out, "Path of the stage dump (default: <stage>.csv)");
    sub->add_option("--dump-stride", stride, "Keep every n-th sample in dumps")
        ->check(CLI::PositiveNumber);
    metric_cmds.emplace_back(sub, m);
  }

  CLI::App* eval = app.add_subcommand("eval", "Run an evaluation grid for both variants");
  add_common(eval, cfg);
  eval->add_option("grid", grid, "Grid name or 'all'")->required();
  eval->add_option("--out-dir", out_dir, "Directory for one file per grid");
  eval->add_option("--loudness-duration", dur.loudness_s, "Seconds per loudness stimulus");
  eval->add_option("--sharpness-duration", dur.sharpness_s, "Seconds per sharpness stimulus");
  eval->add_option("--roughness-duration", dur.roughness_s, "Seconds per roughness stimulus");
  eval->add_option("--fluctuation-duration", dur.fluctuation_s,
                   "Seconds per fluctuation stimulus");

  CLI::App* dump_cmd = app.add_subcommand("dump", "Export an intermediate pipeline stage");
  std::string stage, stage_metric = "roughness";
  dump_cmd->add_option("stage", stage, "Stage")
      ->required()
      ->check(CLI::IsMember({"channels", "excitation", "specific-loudness", "bandpassed",
                             "envelopes", "correlations"}));
  add_common(dump_cmd, cfg);
  add_input(dump_cmd, in);
  dump_cmd->add_option("--metric", stage_metric, "Modulation settings for later stages")
      ->check(CLI::IsMember({"roughness", "fluctuation"}));
  dump_cmd->add_option("--dump-stride", stride, "Keep every n-th sample")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& [sub, m] : metric_cmds) {
      if (sub->parsed()) {
        return run_metric(m, cfg, in, series_out, channels_out, dump, dump_out, stride);
      }
    }
    if (eval->parsed()) return run_eval(cfg, grid, out_dir, dur);
    if (dump_cmd->parsed()) {
      sqm::CalibratedSignal signal = load_input(in, cfg);
      const sqm::Analyzer a(analyzer_options(cfg, sqm::parse_filterbank(cfg.fb)),
                            signal.sample_rate());
      if (in.target_sone > 0.0) {
        signal = sqm::scale_to_loudness(signal, in.target_sone,
                                        [&](const sqm::CalibratedSignal& x) {
                                          return a.loudness(x).mean;
                                        });
      }
      emit(cfg, dump_stage(stage, a, signal, sqm::parse_metric(stage_metric), stride));
      return 0;
    }
  } catch (const sqm::SilentInputError& e) {
    std::cerr << "sqm: undefined for silent input: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "sqm: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
