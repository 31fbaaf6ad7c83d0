// sneed command line: catalog inspection, file sharding, simulation runs.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sneed/sneed.hpp"

namespace {

bool log_enabled() {
  const char* v = std::getenv("SNEED_LOG");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void logln(const std::string& msg) {
  // One stream write per line so worker threads cannot interleave.
  if (log_enabled()) std::cerr << ("[sneed] " + msg + "\n");
}

// Exit codes: 0 ok, 2 config/usage, 3 not found, 4 io, 5 unrecoverable or
// insufficient shards, 6 malformed packet data, 10 internal.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNotFound = 3;
constexpr int kExitIo = 4;
constexpr int kExitUnrecoverable = 5;
constexpr int kExitMalformed = 6;
constexpr int kExitInternal = 10;

int fail(const char* kind, const std::string& msg, int code) {
  std::cerr << "sneed: " << kind << ": " << msg << "\n";
  return code;
}

std::string catalog_row(const sneed::CatalogEntry& e) {
  return std::to_string(e.n) + " " + std::to_string(e.m) + " [" +
         std::to_string(e.n) + "," + std::to_string(e.k) + "," +
         std::to_string(e.d) + "] " + e.type +
         (e.buildable ? " buildable=yes" : " buildable=no");
}

int cmd_catalog(const std::optional<unsigned>& n) {
  if (n) {
    std::cout << catalog_row(sneed::catalog_lookup(*n)) << "\n";
    return kExitOk;
  }
  for (const auto& e : sneed::catalog()) std::cout << catalog_row(e) << "\n";
  return kExitOk;
}

struct CodeFlags {
  std::string scheme = "binary";
  unsigned n = 7;
  unsigned t = 1;
  unsigned field_m = 8;
  std::string generator_file;
};

sneed::SneedCode make_code(const CodeFlags& f) {
  if (f.scheme == "binary")
    return sneed::build_code_from_catalog(sneed::catalog_lookup(f.n));
  if (f.scheme == "vandermonde")
    return sneed::build_vandermonde_code(f.n, f.t,
                                         sneed::FieldSpec::gf2m(f.field_m));
  if (f.scheme == "generator") {
    if (f.generator_file.empty())
      throw sneed::ConfigError("--scheme generator needs --generator FILE");
    return sneed::load_generator_file(f.generator_file);
  }
  throw sneed::ConfigError("unknown scheme for sharding: " + f.scheme);
}

int cmd_encode(const std::string& input, const std::string& out_dir,
               const CodeFlags& flags, uint64_t chunk,
               const std::string& digest) {
  const auto code = make_code(flags);
  logln("sharding " + input + " over " + code.label());
  const auto manifest = sneed::shard_encode_file(
      input, out_dir, code, flags.scheme, chunk, sneed::digest_from_name(digest));
  std::cout << "wrote " << manifest.n << " shards + manifest to " << out_dir
            << " (" << manifest.stripes << " stripes, k=" << manifest.k
            << ", chunk=" << manifest.chunk_bytes << ")\n";
  return kExitOk;
}

int cmd_decode(const std::string& shard_dir, const std::string& out) {
  const auto result = sneed::shard_decode(shard_dir, out);
  std::cout << "wrote " << out << " (" << result.bytes_written
            << " bytes); erased channels:";
  if (result.erased.empty()) std::cout << " none";
  for (std::size_t j : result.erased) std::cout << " " << (j + 1);
  std::cout << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& shard_dir) {
  const auto scan = sneed::scan_shards(shard_dir);
  for (const auto& st : scan.statuses) {
    std::cout << st.file << " ";
    switch (st.state) {
      case sneed::ShardState::Ok: std::cout << "ok"; break;
      case sneed::ShardState::Missing:
        std::cout << "missing (" << st.reason << ")";
        break;
      case sneed::ShardState::Corrupt:
        std::cout << "corrupt (" << st.reason << ")";
        break;
    }
    std::cout << "\n";
  }
  const auto usable = scan.manifest.n - scan.erased.size();
  std::cout << "usable " << usable << " of " << scan.manifest.n << ", need "
            << scan.manifest.k << "; decodable "
            << (scan.decodable ? "yes" : "no") << "\n";
  return scan.decodable ? kExitOk
                        : fail("unrecoverable",
                               "surviving shards cannot reconstruct the file",
                               kExitUnrecoverable);
}

struct SimulateFlags {
  std::string scheme = "rotation";
  unsigned n = 4;
  unsigned t = 1;
  unsigned field_m = 4;
  std::string generator_file;
  std::string adversary = "none";
  std::string placement = "random";
  uint64_t cycles = 100;
  uint64_t seed = 0;
  uint64_t message_len = 16;
  std::string digest = "sha256";
  std::string json_path;
  unsigned runs = 1;
  unsigned jobs = 1;
  bool no_audit = false;
};

sneed::SimConfig sim_config(const SimulateFlags& f) {
  sneed::SimConfig cfg;
  if (f.scheme == "rotation")
    cfg.scheme = sneed::SchemeKind::Rotation;
  else if (f.scheme == "binary")
    cfg.scheme = sneed::SchemeKind::BinaryCode;
  else if (f.scheme == "vandermonde")
    cfg.scheme = sneed::SchemeKind::Vandermonde;
  else if (f.scheme == "generator")
    cfg.scheme = sneed::SchemeKind::Custom;
  else
    throw sneed::ConfigError("unknown scheme: " + f.scheme);

  if (f.adversary == "none")
    cfg.adversary = sneed::AdversaryKind::None;
  else if (f.adversary == "passive")
    cfg.adversary = sneed::AdversaryKind::Passive;
  else if (f.adversary == "modify")
    cfg.adversary = sneed::AdversaryKind::ActiveModify;
  else if (f.adversary == "fabricate")
    cfg.adversary = sneed::AdversaryKind::ActiveFabricate;
  else
    throw sneed::ConfigError("unknown adversary: " + f.adversary);

  if (f.placement == "random")
    cfg.placement = sneed::PlacementKind::Random;
  else if (f.placement == "exhaustive")
    cfg.placement = sneed::PlacementKind::Exhaustive;
  else
    throw sneed::ConfigError("unknown placement: " + f.placement);

  cfg.n = f.n;
  cfg.t = f.t;
  cfg.field_m = f.field_m;
  cfg.cycles = f.cycles;
  cfg.seed = f.seed;
  cfg.message_len = f.message_len;
  cfg.digest = sneed::digest_from_name(f.digest);
  cfg.audit = !f.no_audit;

  if (cfg.scheme == sneed::SchemeKind::Custom) {
    if (f.generator_file.empty())
      throw sneed::ConfigError("--scheme generator needs --generator FILE");
    cfg.custom_code = sneed::load_generator_file(f.generator_file);
    cfg.n = cfg.custom_code->n();
  }
  return cfg;
}

std::string ratio_str(uint64_t num, uint64_t den) {
  return std::to_string(num) + "/" + std::to_string(den);
}

uint64_t clean_cycles(const sneed::SimulationReport& r) {
  uint64_t clean = 0;
  for (const auto& c : r.cycle_log)
    if (c.failures == 0) ++clean;
  return clean;
}

void print_run_summary(const sneed::SimulationReport& r) {
  const auto capacity = sneed::measure_capacity(r);
  std::cout << "seed=" << r.seed << " capacity=" << capacity.str()
            << " delivered=" << ratio_str(r.messages_delivered, r.messages_sent)
            << " recovery=" << ratio_str(clean_cycles(r), r.cycles)
            << " recovered_symbols=" << r.messages_recovered
            << " detections=" << r.detections
            << " fabrications_rejected=" << r.fabrications_rejected
            << " leakage_findings=" << r.leakage.size() << "\n";
}

int cmd_simulate(const SimulateFlags& f) {
  if (f.runs < 1) throw sneed::ConfigError("--runs must be at least 1");
  const auto base = sim_config(f);
  std::vector<sneed::SimulationReport> reports(f.runs);
  std::vector<std::exception_ptr> errors(f.runs);

  const auto run_one = [&](unsigned i) {
    try {
      sneed::SimConfig cfg = base;
      cfg.seed = base.seed + i;
      reports[i] = sneed::run_simulation(cfg);
      logln("run " + std::to_string(i + 1) + "/" + std::to_string(f.runs) +
            " seed=" + std::to_string(cfg.seed) + " done");
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  if (f.jobs <= 1 || f.runs == 1) {
    for (unsigned i = 0; i < f.runs; ++i) run_one(i);
  } else {
    std::atomic<unsigned> next{0};
    std::vector<std::thread> workers;
    const unsigned count = std::min(f.jobs, f.runs);
    for (unsigned w = 0; w < count; ++w)
      workers.emplace_back([&] {
        for (unsigned i = next.fetch_add(1); i < f.runs;
             i = next.fetch_add(1))
          run_one(i);
      });
    for (auto& t : workers) t.join();
  }
  // Reports and failures surface in seed order regardless of worker timing.
  for (unsigned i = 0; i < f.runs; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  for (const auto& r : reports) print_run_summary(r);
  if (f.runs > 1) {
    uint64_t sent = 0, delivered = 0, clean = 0, cycles = 0, leak = 0;
    for (const auto& r : reports) {
      sent += r.messages_sent;
      delivered += r.messages_delivered;
      clean += clean_cycles(r);
      cycles += r.cycles;
      leak += r.leakage.size();
    }
    std::cout << "total runs=" << f.runs << " delivered="
              << ratio_str(delivered, sent) << " recovery="
              << ratio_str(clean, cycles) << " leakage_findings=" << leak
              << "\n";
  }

  if (!f.json_path.empty()) {
    std::string text;
    if (f.runs == 1) {
      text = sneed::report_to_string(reports[0]);
    } else {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : reports) arr.push_back(sneed::report_to_json(r));
      text = arr.dump(2) + "\n";
    }
    std::ofstream out(f.json_path, std::ios::binary | std::ios::trunc);
    if (!out) throw sneed::IoError("cannot create " + f.json_path);
    out << text;
    if (!out) throw sneed::IoError("write failed on " + f.json_path);
    logln("report written to " + f.json_path);
  }
  return kExitOk;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const sneed::NotFoundError& e) {
    return fail("not-found", e.what(), kExitNotFound);
  } catch (const sneed::UnsupportedEntryError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const sneed::ConfigError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const sneed::MissingKeyError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const sneed::FieldTooSmallError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const sneed::FieldConstructionError& e) {
    return fail("config", e.what(), kExitConfig);
  } catch (const sneed::InsufficientShardsError& e) {
    return fail("insufficient-shards", e.what(), kExitUnrecoverable);
  } catch (const sneed::UnrecoverablePatternError& e) {
    return fail("unrecoverable", e.what(), kExitUnrecoverable);
  } catch (const sneed::MalformedPacketError& e) {
    return fail("malformed", e.what(), kExitMalformed);
  } catch (const sneed::IoError& e) {
    return fail("io", e.what(), kExitIo);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitInternal);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sneed multipath protection toolkit"};
  app.require_subcommand(1);

  // catalog
  auto* catalog_cmd =
      app.add_subcommand("catalog", "List the published protection codes");
  std::optional<unsigned> catalog_n;
  catalog_cmd->add_option("--n", catalog_n, "Show only the row with this n");

  // shared code flags for encode
  CodeFlags code_flags;
  std::string encode_input, encode_out;
  uint64_t encode_chunk = 4096;
  std::string encode_digest = "sha256";
  auto* encode_cmd =
      app.add_subcommand("encode", "Split a file into protected shards");
  encode_cmd->add_option("--input", encode_input, "File to protect")
      ->required();
  encode_cmd->add_option("--out", encode_out, "Output shard directory")
      ->required();
  encode_cmd->add_option("--scheme", code_flags.scheme,
                         "binary | vandermonde | generator");
  encode_cmd->add_option("--n", code_flags.n, "Channel count");
  encode_cmd->add_option("--t", code_flags.t,
                         "Tolerated erasures (vandermonde)");
  encode_cmd->add_option("--field-m", code_flags.field_m,
                         "Symbol field degree (vandermonde)");
  encode_cmd->add_option("--generator", code_flags.generator_file,
                         "Generator matrix file");
  encode_cmd->add_option("--chunk", encode_chunk, "Chunk bytes per shard");
  encode_cmd->add_option("--digest", encode_digest, "sha256 | sha1 | md5");

  // decode
  std::string decode_dir, decode_out;
  auto* decode_cmd =
      app.add_subcommand("decode", "Reconstruct a file from shards");
  decode_cmd->add_option("--shards", decode_dir, "Shard directory")
      ->required();
  decode_cmd->add_option("--out", decode_out, "Reconstructed file path")
      ->required();

  // verify
  std::string verify_dir;
  auto* verify_cmd =
      app.add_subcommand("verify", "Check shard integrity and decodability");
  verify_cmd->add_option("--shards", verify_dir, "Shard directory")
      ->required();

  // simulate
  SimulateFlags sim;
  auto* sim_cmd =
      app.add_subcommand("simulate", "Run an adversarial channel simulation");
  sim_cmd->add_option("--scheme", sim.scheme,
                      "rotation | binary | vandermonde | generator");
  sim_cmd->add_option("--n", sim.n, "Channel count");
  sim_cmd->add_option("--t", sim.t, "Attacked channels per cycle");
  sim_cmd->add_option("--field-m", sim.field_m, "Symbol field degree");
  sim_cmd->add_option("--generator", sim.generator_file,
                      "Generator matrix file");
  sim_cmd->add_option("--adversary", sim.adversary,
                      "none | passive | modify | fabricate");
  sim_cmd->add_option("--placement", sim.placement, "random | exhaustive");
  sim_cmd->add_option("--cycles", sim.cycles, "Cycles per run");
  sim_cmd->add_option("--seed", sim.seed, "Base RNG seed");
  sim_cmd->add_option("--message-len", sim.message_len,
                      "Message bytes (symbols beyond GF(2^8))");
  sim_cmd->add_option("--digest", sim.digest, "sha256 | sha1 | md5");
  sim_cmd->add_option("--json", sim.json_path, "Write the JSON report here");
  sim_cmd->add_option("--runs", sim.runs,
                      "Independent runs with seeds seed..seed+runs-1");
  sim_cmd->add_option("--jobs", sim.jobs, "Worker threads for --runs");
  sim_cmd->add_flag("--no-audit", sim.no_audit,
                    "Skip the eavesdropper leakage audit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "sneed: config: " << e.what() << "\n";
    return kExitConfig;
  }

  if (catalog_cmd->parsed()) return guarded([&] { return cmd_catalog(catalog_n); });
  if (encode_cmd->parsed())
    return guarded([&] {
      return cmd_encode(encode_input, encode_out, code_flags, encode_chunk,
                        encode_digest);
    });
  if (decode_cmd->parsed())
    return guarded([&] { return cmd_decode(decode_dir, decode_out); });
  if (verify_cmd->parsed())
    return guarded([&] { return cmd_verify(verify_dir); });
  if (sim_cmd->parsed()) return guarded([&] { return cmd_simulate(sim); });
  std::cerr << "sneed: config: no subcommand\n";
  return kExitConfig;
}
