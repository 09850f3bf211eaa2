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

#ifndef LARA_CA_JOURNAL_H_
#define LARA_CA_JOURNAL_H_

#include <fstream>
#include <string>
#include <vector>

#include "lara/ca.h"

// Append-only CA journal. File layout: "LCJ1" followed by records of the
// form type (1B) || be32(body length) || body. See docs/formats.md.

namespace lara {

Bytes EncodeJournalRecord(const JournalRecord& record);
// Parses a whole journal image, header included.
std::vector<JournalRecord> DecodeJournal(ByteView bytes);

class JournalFile {
 public:
  // Creates the file with its header when it does not exist yet.
  explicit JournalFile(std::string path);

  std::vector<JournalRecord> ReadAll() const;
  void Append(const JournalRecord& record);

  // Replays the journal into `ca`, then routes its future records here.
  void Attach(CertificationAuthority& ca);

 private:
  std::string path_;
};

}  // namespace lara

#endif  // LARA_CA_JOURNAL_H_
