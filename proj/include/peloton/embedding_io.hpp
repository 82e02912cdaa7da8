#pragma once

#include <istream>
#include <ostream>
#include <span>

#include "peloton/model.hpp"

namespace peloton {

/// CSV with header `entity_type,entity_key,d0,...,d{D-1}`: rider rows in
/// index order, then race rows. Values use shortest round-trip formatting.
void write_embeddings(std::ostream& out, const EmbeddingSet& embeddings);

/// Inverse of write_embeddings. Row order within each entity type becomes
/// the index order. Throws FormatError naming the bad line.
EmbeddingSet read_embeddings(std::istream& in);

/// `epoch,loss` rows starting at epoch 0.
void write_loss_history(std::ostream& out, std::span<const double> history);

}  // namespace peloton
