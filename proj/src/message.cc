// Copyright 2026 The DSC Codec Authors
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


#include "dsc/message.h"

#include <algorithm>
#include <numeric>

#include "dsc/byte_io.h"
#include "dsc/error.h"

namespace dsc {

namespace {

void CheckHeader(const MessageHeader& h, ErrorCode code) {
  auto fail = [code](const std::string& what) { throw Error(code, "message header: " + what); };
  if (h.version != kMessageVersion) fail("unsupported version " + std::to_string(h.version));
  if (h.flags != 0) fail("reserved flags set");
  if (h.channels == 0 || h.height == 0 || h.width == 0) fail("zero feature dimension");
  if (h.embed_dim == 0 || h.codebook_size == 0) fail("zero codebook dimension");
  if (h.precision < 8 || h.precision > 16) fail("precision outside [8, 16]");
}

void CheckBody(const Message& m, ErrorCode code) {
  auto fail = [code](const std::string& what) { throw Error(code, "message body: " + what); };
  const MessageHeader& h = m.header;
  if (m.mask.height() != h.height || m.mask.width() != h.width) fail("mask shape");
  if (m.mask.count() != m.symbol_count) fail("mask population differs from symbol count");
  if (m.frequencies.size() != h.codebook_size) fail("frequency table size differs from K");
  const std::uint64_t sum =
      std::accumulate(m.frequencies.begin(), m.frequencies.end(), std::uint64_t{0});
  if (m.symbol_count == 0) {
    if (sum != 0 || !m.payload.empty() || m.final_state != kRansLowerBound) {
      fail("zero-symbol message must carry an empty table and payload");
    }
  } else if (sum != (std::uint64_t{1} << h.precision)) {
    fail("frequencies do not sum to 2^precision");
  }
}

}  // namespace

MessageLayout message_layout(const Message& msg) {
  MessageLayout layout;
  layout.header = kMessageFixedHeaderBytes;
  layout.mask = (msg.mask.cells() + 7) / 8;
  layout.table = 2 * msg.frequencies.size();
  layout.payload = msg.payload.size();
  layout.state = 4;
  return layout;
}

Message make_message(const MessageHeader& header, const Mask& mask, const IndexMap& idx) {
  Message msg;
  msg.header = header;
  msg.mask = mask;
  msg.symbol_count = static_cast<std::uint32_t>(idx.size());
  msg.frequencies.assign(header.codebook_size, 0);
  if (!idx.empty()) {
    const FrequencyTable ft = build_freq_table(idx, header.codebook_size, header.precision);
    for (int k = 0; k < ft.size(); ++k) {
      if (ft.freq(k) > 0xFFFF) {
        throw Error(ErrorCode::kInvalidArgument, "frequency does not fit the u16 wire field");
      }
      msg.frequencies[static_cast<std::size_t>(k)] = static_cast<std::uint16_t>(ft.freq(k));
    }
    RansStream stream = rans_encode(idx, ft);
    msg.payload = std::move(stream.payload);
    msg.final_state = stream.final_state;
  }
  CheckHeader(msg.header, ErrorCode::kInvalidArgument);
  CheckBody(msg, ErrorCode::kInvalidArgument);
  return msg;
}

std::vector<std::uint8_t> SerializeMessage(const Message& msg) {
  CheckHeader(msg.header, ErrorCode::kInvalidArgument);
  CheckBody(msg, ErrorCode::kInvalidArgument);
  const MessageHeader& h = msg.header;
  ByteWriter w;
  w.Tag("DSC1");
  w.U8(h.version);
  w.U8(h.flags);
  w.U16(h.channels);
  w.U16(h.height);
  w.U16(h.width);
  w.U16(h.embed_dim);
  w.U16(h.codebook_size);
  w.U8(h.precision);
  w.U64(h.codebook_hash);
  const auto packed = msg.mask.Pack();
  w.U32(static_cast<std::uint32_t>(packed.size()));
  w.Bytes(packed);
  w.U32(msg.symbol_count);
  for (std::uint16_t f : msg.frequencies) w.U16(f);
  w.U32(static_cast<std::uint32_t>(msg.payload.size()));
  w.Bytes(msg.payload);
  w.U32(msg.final_state);
  return w.Take();
}

Message ParseMessage(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectTag("DSC1");
  Message msg;
  MessageHeader& h = msg.header;
  h.version = r.U8();
  h.flags = r.U8();
  h.channels = r.U16();
  h.height = r.U16();
  h.width = r.U16();
  h.embed_dim = r.U16();
  h.codebook_size = r.U16();
  h.precision = r.U8();
  h.codebook_hash = r.U64();
  CheckHeader(h, ErrorCode::kParse);
  const std::uint32_t mask_len = r.U32();
  const std::size_t cells = static_cast<std::size_t>(h.height) * h.width;
  if (mask_len != (cells + 7) / 8) throw Error(ErrorCode::kParse, "mask length field");
  msg.mask = Mask::Unpack(h.height, h.width, r.Bytes(mask_len));
  msg.symbol_count = r.U32();
  msg.frequencies.resize(h.codebook_size);
  for (auto& f : msg.frequencies) f = r.U16();
  const std::uint32_t payload_len = r.U32();
  const auto payload = r.Bytes(payload_len);
  msg.payload.assign(payload.begin(), payload.end());
  msg.final_state = r.U32();
  r.ExpectEnd();
  CheckBody(msg, ErrorCode::kParse);
  return msg;
}

IndexMap decode_symbols(const Message& msg) {
  if (msg.symbol_count == 0) return {};
  const FrequencyTable ft(std::vector<std::uint32_t>(msg.frequencies.begin(), msg.frequencies.end()),
                          msg.header.precision);
  return rans_decode(msg.payload, ft, msg.symbol_count, msg.final_state);
}

}  // namespace dsc
