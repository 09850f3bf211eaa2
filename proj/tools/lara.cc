// Copyright 2026 The LARA Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// lara: command-line driver for the CA, verifier, client and bench roles.
//
// Exit codes: 0 accepted, 1 usage or local error, 2 revoked (found during
// audit, nothing sent), 3 rejected by the verifier, 4 audit inconclusive,
// 5 typed error from the verifier.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "lara/bench.h"
#include "lara/ca.h"
#include "lara/ca_journal.h"
#include "lara/client.h"
#include "lara/config.h"
#include "lara/transport.h"
#include "lara/verifier.h"
#include "lara/wallet_file.h"

namespace fs = std::filesystem;
using namespace lara;

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRevoked = 2;
constexpr int kExitRejected = 3;
constexpr int kExitInconclusive = 4;
constexpr int kExitRemoteError = 5;

volatile std::sig_atomic_t g_stop = 0;
void OnSignal(int) { g_stop = 1; }

Bytes ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return Bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void WriteFile(const std::string& path, ByteView data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
}

struct Common {
  std::string config_path;
  std::string out_path;
  std::string transport = "tcp";
  std::optional<uint64_t> rng_seed;
};

std::unique_ptr<RandomSource> MakeRandom(const Common& common) {
  if (common.rng_seed) return std::make_unique<DeterministicRandom>(*common.rng_seed);
  return std::make_unique<SystemRandom>();
}

Config LoadConfig(const Common& common) {
  return common.config_path.empty() ? Config() : Config::Load(common.config_path);
}

std::string Passphrase(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("LARA_PASSPHRASE")) return env;
  throw Error(ErrorCode::kInvalidArgument, "wallet passphrase needed (--passphrase or LARA_PASSPHRASE)");
}

// CA state lives in a directory: ca.key (32-byte seed), ca.pub, ca.journal.
struct CaHandle {
  std::unique_ptr<RandomSource> rng;
  std::unique_ptr<CertificationAuthority> ca;
  std::unique_ptr<JournalFile> journal;
};

CaHandle OpenCa(const std::string& dir, const Common& common) {
  CaHandle h;
  h.rng = MakeRandom(common);
  const Bytes seed = ReadFile((fs::path(dir) / "ca.key").string());
  if (seed.size() != 32) throw Error(ErrorCode::kMalformed, "ca.key must hold 32 bytes");
  h.ca = std::make_unique<CertificationAuthority>(KeyPairFromSeed(seed), *h.rng);
  h.journal = std::make_unique<JournalFile>((fs::path(dir) / "ca.journal").string());
  h.journal->Attach(*h.ca);
  return h;
}

PublicKey LoadPublicKey(const std::string& path) {
  const Bytes b = ReadFile(path);
  if (b.size() != PublicKey::kSize) throw Error(ErrorCode::kMalformed, path + " must hold 32 bytes");
  return PublicKey::FromView(b);
}

int RunAuthenticate(Channel& channel, Wallet& wallet) {
  Client client(wallet, channel);
  const AuditOutcome outcome = client.Audit();
  std::cout << "audit=" << AuditStatusName(outcome.status)
            << " encoding=" << RlEncodingName(outcome.encoding)
            << " transferred_bytes=" << outcome.transferred_bytes << "\n";
  if (outcome.remote_error) {
    std::cout << "error=" << wire::ErrorKindName(*outcome.remote_error) << "\n";
    return kExitRemoteError;
  }
  if (outcome.status == AuditStatus::kRevoked) {
    std::cout << "decision=none (pseudonym is revoked; no request sent)\n";
    return kExitRevoked;
  }
  if (outcome.status == AuditStatus::kInconclusive) {
    std::cout << "decision=none (" << outcome.detail << ")\n";
    return kExitInconclusive;
  }
  const Decision decision = client.Authenticate(outcome);
  std::cout << "decision=" << DecisionName(decision)
            << " transferred_bytes=" << channel.bytes_received() << "\n";
  return decision == Decision::kAccept ? kExitAccept : kExitRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LARA pseudonym authentication with verifier-local revocation"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "flat key = value config file");
  app.add_option("--out", common.out_path, "output path (CSV for bench)");
  app.add_option("--transport", common.transport, "loopback or tcp")
      ->check(CLI::IsMember({"loopback", "tcp"}));
  app.add_option("--rng-seed", common.rng_seed, "deterministic randomness (testing only)");

  // ca
  CLI::App* ca = app.add_subcommand("ca", "certification authority");
  ca->require_subcommand(1);
  std::string ca_dir = ".";
  ca->add_option("--dir", ca_dir, "CA state directory");
  std::string client_id;
  uint32_t count = 10;
  std::string wallet_path, passphrase, rl_out;
  bool fast_kdf = false;

  CLI::App* keygen = ca->add_subcommand("keygen", "create ca.key and ca.pub");
  CLI::App* enroll = ca->add_subcommand("enroll", "register a client");
  enroll->add_option("--client", client_id)->required();
  CLI::App* issue = ca->add_subcommand("issue", "issue pseudonyms into a wallet");
  issue->add_option("--client", client_id)->required();
  issue->add_option("--count", count)->check(CLI::Range(1u, 1000000u));
  issue->add_option("--wallet", wallet_path)->required();
  issue->add_option("--passphrase", passphrase);
  issue->add_flag("--fast-kdf", fast_kdf, "cheap wallet key derivation (tests)");
  CLI::App* revoke = ca->add_subcommand("revoke", "revoke a client and publish an RL");
  revoke->add_option("--client", client_id)->required();
  revoke->add_option("--rl-out", rl_out)->required();
  CLI::App* publish = ca->add_subcommand("publish", "publish an RL for the revoked set");
  publish->add_option("--rl-out", rl_out)->required();
  CLI::App* advance = ca->add_subcommand("advance-epoch", "start a new epoch");

  // verifier
  CLI::App* verifier = app.add_subcommand("verifier", "relying party");
  verifier->require_subcommand(1);
  std::string ca_pub_path, rl_path, host = "127.0.0.1";
  uint16_t port = 0;
  CLI::App* serve = verifier->add_subcommand("serve", "run a verifier endpoint");
  serve->add_option("--ca-pub", ca_pub_path)->required();
  serve->add_option("--rl", rl_path, "RL to install at start");
  serve->add_option("--port", port);
  serve->add_option("--bind", host);
  CLI::App* install = verifier->add_subcommand("install", "push an RL to a running verifier");
  install->add_option("--rl", rl_path)->required();
  install->add_option("--host", host);
  install->add_option("--port", port)->required();

  // client
  CLI::App* client = app.add_subcommand("client", "pseudonym holder");
  client->require_subcommand(1);
  CLI::App* authenticate = client->add_subcommand("authenticate", "audit the RL, then authenticate");
  authenticate->add_option("--wallet", wallet_path)->required();
  authenticate->add_option("--passphrase", passphrase);
  authenticate->add_option("--host", host);
  authenticate->add_option("--port", port);
  authenticate->add_option("--ca-pub", ca_pub_path, "loopback transport: CA key");
  authenticate->add_option("--rl", rl_path, "loopback transport: RL to serve in-process");
  CLI::App* info = client->add_subcommand("info", "show wallet contents");
  info->add_option("--wallet", wallet_path)->required();
  info->add_option("--passphrase", passphrase);

  // bench
  CLI::App* bench = app.add_subcommand("bench", "run benchmark scenarios, CSV output");
  std::string scenario;
  bench->add_option("scenario", scenario,
                    "rl-generation, rl-size, hbfa-overhead, rs-overhead, "
                    "expected-transfer, auth-latency or all");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config config = LoadConfig(common);

    if (*ca) {
      if (*keygen) {
        fs::create_directories(ca_dir);
        auto rng = MakeRandom(common);
        const Seed seed = RandomSeed(*rng);
        const KeyPair keys = KeyPairFromSeed(seed.view());
        WriteFile((fs::path(ca_dir) / "ca.key").string(), seed.view());
        fs::permissions(fs::path(ca_dir) / "ca.key", fs::perms::owner_read | fs::perms::owner_write);
        WriteFile((fs::path(ca_dir) / "ca.pub").string(), keys.public_key.view());
        std::cout << "ca_public=" << keys.public_key.Hex() << "\n";
        return 0;
      }
      CaHandle h = OpenCa(ca_dir, common);
      const RlConfig rl = RlConfigFrom(config);
      if (*enroll) {
        h.ca->EnrollClient(client_id);
        std::cout << "enrolled " << client_id << "\n";
      } else if (*issue) {
        const std::string pass = Passphrase(passphrase);
        std::vector<PseudonymSecret> issued = h.ca->IssuePseudonyms(client_id, count);
        std::optional<Wallet> wallet;
        if (fs::exists(wallet_path)) {
          wallet.emplace(LoadWalletFile(wallet_path, pass));
          if (wallet->ca_public() != h.ca->public_key()) {
            throw Error(ErrorCode::kInvalidArgument, "wallet belongs to another CA");
          }
          wallet->Add(issued);
        } else {
          wallet.emplace(h.ca->public_key(), std::move(issued));
        }
        SaveWalletFile(wallet_path, *wallet, pass,
                       fast_kdf ? WalletKdf::Minimal() : WalletKdf::Interactive(), *h.rng);
        std::cout << "issued " << count << " pseudonyms to " << client_id
                  << " (epoch " << h.ca->current_epoch() << ")\n";
      } else if (*revoke || *publish) {
        const RevocationList list =
            *revoke ? h.ca->RevokeClient(client_id, rl) : h.ca->PublishRl(rl);
        const Bytes file = list.Serialize();
        WriteFile(rl_out, file);
        std::cout << "rl_version=" << list.version << " encoding=" << RlEncodingName(list.encoding())
                  << " revoked_pseudonyms=" << h.ca->revoked_pseudonyms().size()
                  << " bytes=" << file.size() << "\n";
      } else if (*advance) {
        h.ca->AdvanceEpoch();
        std::cout << "epoch=" << h.ca->current_epoch() << "\n";
      }
      return 0;
    }

    if (*verifier) {
      if (*serve) {
        Verifier v(LoadPublicKey(ca_pub_path));
        if (!rl_path.empty()) v.InstallBytes(ReadFile(rl_path));
        VerifierService service(v);
        TcpServer server(service, port, host);
        server.Start();
        std::signal(SIGINT, OnSignal);
        std::signal(SIGTERM, OnSignal);
        std::cout << "listening on " << host << ":" << server.port() << std::endl;
        while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
        server.Stop();
        return 0;
      }
      if (*install) {
        auto channel = TcpChannel::Connect(host, port);
        const wire::Message reply = channel->Call(wire::InstallRl{ReadFile(rl_path)});
        if (const auto* ack = std::get_if<wire::InstallAck>(&reply.body)) {
          std::cout << "installed rl_version=" << ack->version << "\n";
          return 0;
        }
        if (const auto* e = std::get_if<wire::ErrorMsg>(&reply.body)) {
          std::cerr << "error=" << wire::ErrorKindName(e->kind) << " " << e->message << "\n";
          return kExitRemoteError;
        }
        std::cerr << "unexpected reply\n";
        return kExitUsage;
      }
    }

    if (*client) {
      const std::string pass = Passphrase(passphrase);
      const Bytes sealed = ReadFile(wallet_path);
      Wallet wallet = OpenWallet(sealed, pass);
      if (*info) {
        std::cout << "ca_public=" << wallet.ca_public().Hex()
                  << " pseudonyms=" << wallet.pseudonyms().size()
                  << " unused=" << wallet.unused_count() << "\n";
        return 0;
      }
      int code = kExitUsage;
      auto rng = MakeRandom(common);
      if (common.transport == "loopback") {
        if (ca_pub_path.empty() || rl_path.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "loopback transport needs --ca-pub and --rl");
        }
        Verifier v(LoadPublicKey(ca_pub_path));
        v.InstallBytes(ReadFile(rl_path));
        VerifierService service(v);
        LoopbackChannel channel(service);
        code = RunAuthenticate(channel, wallet);
      } else {
        if (port == 0) throw Error(ErrorCode::kInvalidArgument, "--port is required for tcp");
        auto channel = TcpChannel::Connect(host, port);
        code = RunAuthenticate(*channel, wallet);
      }
      // Persist used and burned pseudonyms.
      SaveWalletFile(wallet_path, wallet, pass, SealedWalletKdf(sealed), *rng);
      return code;
    }

    if (*bench) {
      BenchConfig bc = BenchConfig::From(config);
      if (!scenario.empty()) bc.scenario = scenario;
      if (common.rng_seed) bc.rng_seed = *common.rng_seed;
      if (!common.out_path.empty()) bc.output_path = common.out_path;
      const std::string csv = FormatCsv(RunBench(bc));
      if (bc.output_path.empty()) {
        std::cout << csv;
      } else {
        WriteFile(bc.output_path, AsBytes(csv));
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "lara: " << ErrorCodeName(e.code()) << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "lara: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
