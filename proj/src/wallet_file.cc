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

#include "lara/wallet_file.h"

#include <sodium.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace lara {

namespace {

constexpr char kMagic[4] = {'L', 'W', 'L', '1'};
constexpr size_t kSaltSize = crypto_pwhash_SALTBYTES;
constexpr size_t kNonceSize = crypto_secretbox_NONCEBYTES;

struct WipedKey {
  uint8_t bytes[crypto_secretbox_KEYBYTES];
  ~WipedKey() { sodium_memzero(bytes, sizeof bytes); }
};

void DeriveKey(const std::string& passphrase, const uint8_t* salt, uint64_t ops,
               uint64_t mem, WipedKey* key) {
  if (ops < crypto_pwhash_OPSLIMIT_MIN || ops > crypto_pwhash_OPSLIMIT_MAX ||
      mem < crypto_pwhash_MEMLIMIT_MIN || mem > (uint64_t{1} << 32)) {
    throw Error(ErrorCode::kMalformed, "wallet: key derivation limits out of range");
  }
  if (crypto_pwhash(key->bytes, sizeof key->bytes, passphrase.data(), passphrase.size(),
                    salt, ops, static_cast<size_t>(mem),
                    crypto_pwhash_ALG_ARGON2ID13) != 0) {
    throw Error(ErrorCode::kResourceExhausted, "wallet: key derivation failed");
  }
}

}  // namespace

WalletKdf WalletKdf::Interactive() {
  return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

WalletKdf WalletKdf::Minimal() {
  return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN};
}

Bytes SealWallet(const Wallet& wallet, const std::string& passphrase,
                 const WalletKdf& kdf, RandomSource& rng) {
  ByteWriter plain;
  plain.Append(wallet.ca_public().view());
  plain.U32(static_cast<uint32_t>(wallet.pseudonyms().size()));
  for (const PseudonymSecret& p : wallet.pseudonyms()) {
    plain.Append(p.secret_key.seed());
    plain.Append(p.pseudonym.Encode());
    plain.U8(wallet.IsUsed(p.pseudonym.public_key) ? 1 : 0);
  }
  Bytes message = plain.Take();

  uint8_t salt[kSaltSize];
  uint8_t nonce[kNonceSize];
  rng.Fill({salt, kSaltSize});
  rng.Fill({nonce, kNonceSize});
  WipedKey key;
  DeriveKey(passphrase, salt, kdf.opslimit, kdf.memlimit, &key);

  Bytes box(message.size() + crypto_secretbox_MACBYTES);
  crypto_secretbox_easy(box.data(), message.data(), message.size(), nonce, key.bytes);
  sodium_memzero(message.data(), message.size());

  ByteWriter out;
  out.Append(AsBytes(std::string_view(kMagic, 4)));
  out.U64(kdf.opslimit);
  out.U64(kdf.memlimit);
  out.Append({salt, kSaltSize});
  out.Append({nonce, kNonceSize});
  out.Append(box);
  return out.Take();
}

WalletKdf SealedWalletKdf(ByteView sealed) {
  ByteReader in(sealed);
  ByteView magic = in.Read(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorCode::kMalformed, "wallet: bad magic");
  }
  WalletKdf kdf;
  kdf.opslimit = in.U64();
  kdf.memlimit = in.U64();
  return kdf;
}

Wallet OpenWallet(ByteView sealed, const std::string& passphrase) {
  ByteReader in(sealed);
  ByteView magic = in.Read(4);
  if (!std::equal(magic.begin(), magic.end(), kMagic)) {
    throw Error(ErrorCode::kMalformed, "wallet: bad magic");
  }
  const uint64_t ops = in.U64();
  const uint64_t mem = in.U64();
  ByteView salt = in.Read(kSaltSize);
  ByteView nonce = in.Read(kNonceSize);
  ByteView box = in.Rest();
  if (box.size() < crypto_secretbox_MACBYTES) {
    throw Error(ErrorCode::kMalformed, "wallet: truncated");
  }
  WipedKey key;
  DeriveKey(passphrase, salt.data(), ops, mem, &key);
  Bytes message(box.size() - crypto_secretbox_MACBYTES);
  if (crypto_secretbox_open_easy(message.data(), box.data(), box.size(), nonce.data(),
                                 key.bytes) != 0) {
    throw Error(ErrorCode::kPermissionDenied, "wallet: wrong passphrase or corrupted file");
  }

  ByteReader plain(message);
  const PublicKey ca_public = plain.ReadFixed<PublicKey>();
  const uint32_t count = plain.U32();
  if (uint64_t{count} * (32 + Pseudonym::kEncodedSize + 1) != plain.remaining()) {
    throw Error(ErrorCode::kMalformed, "wallet: entry count mismatch");
  }
  std::vector<PseudonymSecret> entries;
  std::vector<PublicKey> used;
  entries.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    SecretKey secret = SecretKey::FromSeed(plain.Read(32));
    Pseudonym p = Pseudonym::Decode(plain.Read(Pseudonym::kEncodedSize));
    if (secret.public_key() != p.public_key) {
      throw Error(ErrorCode::kMalformed, "wallet: key does not match pseudonym");
    }
    const uint8_t flag = plain.U8();
    if (flag > 1) throw Error(ErrorCode::kMalformed, "wallet: bad used flag");
    if (flag == 1) used.push_back(p.public_key);
    entries.push_back(PseudonymSecret{p, std::move(secret)});
  }
  sodium_memzero(message.data(), message.size());
  Wallet wallet(ca_public, std::move(entries));
  for (const PublicKey& k : used) wallet.Retire(k);
  return wallet;
}

void SaveWalletFile(const std::string& path, const Wallet& wallet,
                    const std::string& passphrase, const WalletKdf& kdf,
                    RandomSource& rng) {
  const Bytes sealed = SealWallet(wallet, passphrase, kdf, rng);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(sealed.data()),
              static_cast<std::streamsize>(sealed.size()));
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::kIo, "cannot replace " + path);
  }
}

Wallet LoadWalletFile(const std::string& path, const std::string& passphrase) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return OpenWallet(data, passphrase);
}

}  // namespace lara
