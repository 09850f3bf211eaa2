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

#include "lara/ca_journal.h"

#include <algorithm>
#include <filesystem>
#include <iterator>

namespace lara {
namespace {

constexpr std::array<uint8_t, 4> kJournalMagic = {'L', 'C', 'J', '1'};

Bytes EncodeBody(const JournalRecord& record) {
  ByteWriter w;
  switch (record.type) {
    case JournalRecord::Type::kEnroll:
    case JournalRecord::Type::kRevoke:
      w.U16(static_cast<uint16_t>(record.client_id.size()));
      w.Append(AsBytes(record.client_id));
      break;
    case JournalRecord::Type::kIssue:
      w.U16(static_cast<uint16_t>(record.client_id.size()));
      w.Append(AsBytes(record.client_id));
      w.U64(record.epoch);
      w.U32(static_cast<uint32_t>(record.issued.size()));
      for (const PseudonymSecret& p : record.issued) {
        w.Append(p.secret_key.seed());
        w.Append(p.pseudonym.Encode());
      }
      break;
    case JournalRecord::Type::kAdvanceEpoch:
      w.U64(record.epoch);
      break;
    case JournalRecord::Type::kPublish:
      w.U64(record.version);
      w.Append(record.seed.view());
      break;
  }
  return w.Take();
}

std::string ReadClientId(ByteReader& r) {
  const uint16_t len = r.U16();
  ByteView id = r.Read(len);
  return std::string(id.begin(), id.end());
}

}  // namespace

Bytes EncodeJournalRecord(const JournalRecord& record) {
  if (record.client_id.size() > 0xffff) {
    throw Error(ErrorCode::kInvalidArgument, "client id too long");
  }
  Bytes body = EncodeBody(record);
  ByteWriter w(5 + body.size());
  w.U8(static_cast<uint8_t>(record.type));
  w.U32(static_cast<uint32_t>(body.size()));
  w.Append(body);
  return w.Take();
}

std::vector<JournalRecord> DecodeJournal(ByteView bytes) {
  ByteReader r(bytes);
  ByteView magic = r.Read(4);
  if (!std::equal(magic.begin(), magic.end(), kJournalMagic.begin())) {
    throw Error(ErrorCode::kMalformed, "bad journal magic");
  }
  std::vector<JournalRecord> out;
  while (r.remaining() > 0) {
    JournalRecord record;
    const uint8_t type = r.U8();
    ByteReader body(r.Read(r.U32()));
    switch (static_cast<JournalRecord::Type>(type)) {
      case JournalRecord::Type::kEnroll:
      case JournalRecord::Type::kRevoke:
        record.client_id = ReadClientId(body);
        break;
      case JournalRecord::Type::kIssue: {
        record.client_id = ReadClientId(body);
        record.epoch = body.U64();
        const uint32_t count = body.U32();
        if (uint64_t{count} * (32 + Pseudonym::kEncodedSize) != body.remaining()) {
          throw Error(ErrorCode::kMalformed, "issuance record length mismatch");
        }
        for (uint32_t i = 0; i < count; ++i) {
          SecretKey key = SecretKey::FromSeed(body.Read(32));
          Pseudonym p = Pseudonym::Decode(body.Read(Pseudonym::kEncodedSize));
          if (key.public_key() != p.public_key) {
            throw Error(ErrorCode::kMalformed, "issued key pair does not match");
          }
          record.issued.push_back(PseudonymSecret{p, std::move(key)});
        }
        break;
      }
      case JournalRecord::Type::kAdvanceEpoch:
        record.epoch = body.U64();
        break;
      case JournalRecord::Type::kPublish:
        record.version = body.U64();
        record.seed = body.ReadFixed<Seed>();
        break;
      default:
        throw Error(ErrorCode::kMalformed, "unknown journal record type");
    }
    body.ExpectEnd("journal record");
    record.type = static_cast<JournalRecord::Type>(type);
    out.push_back(std::move(record));
  }
  return out;
}

JournalFile::JournalFile(std::string path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) {
    std::ofstream out(path_, std::ios::binary);
    out.write(reinterpret_cast<const char*>(kJournalMagic.data()), kJournalMagic.size());
    if (!out) throw Error(ErrorCode::kIo, "cannot create journal " + path_);
  }
}

std::vector<JournalRecord> JournalFile::ReadAll() const {
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open journal " + path_);
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return DecodeJournal(bytes);
}

void JournalFile::Append(const JournalRecord& record) {
  Bytes encoded = EncodeJournalRecord(record);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  out.write(reinterpret_cast<const char*>(encoded.data()),
            static_cast<std::streamsize>(encoded.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "cannot append to journal " + path_);
}

void JournalFile::Attach(CertificationAuthority& ca) {
  for (const JournalRecord& record : ReadAll()) ca.Apply(record);
  ca.set_journal([this](const JournalRecord& record) { Append(record); });
}

}  // namespace lara
