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

#ifndef LARA_WALLET_FILE_H_
#define LARA_WALLET_FILE_H_

#include <string>

#include "lara/client.h"

// Encrypted wallet at rest:
//   "LWL1" || opslimit(8) || memlimit(8) || salt(16) || nonce(24) || box
// The box is XSalsa20-Poly1305 under an Argon2id key derived from the
// passphrase. Plaintext: ca_public(32) || be32(count) ||
// [secret seed(32) || pseudonym(104) || used(1)]*.

namespace lara {

struct WalletKdf {
  uint64_t opslimit;
  uint64_t memlimit;

  static WalletKdf Interactive();
  // Cheapest allowed parameters, for tests.
  static WalletKdf Minimal();
};

Bytes SealWallet(const Wallet& wallet, const std::string& passphrase,
                 const WalletKdf& kdf, RandomSource& rng);
// Throws kPermissionDenied for a wrong passphrase or tampered file.
Wallet OpenWallet(ByteView sealed, const std::string& passphrase);

void SaveWalletFile(const std::string& path, const Wallet& wallet,
                    const std::string& passphrase, const WalletKdf& kdf,
                    RandomSource& rng);
Wallet LoadWalletFile(const std::string& path, const std::string& passphrase);
// Key derivation parameters recorded in a sealed wallet.
WalletKdf SealedWalletKdf(ByteView sealed);

}  // namespace lara

#endif  // LARA_WALLET_FILE_H_
