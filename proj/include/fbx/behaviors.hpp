#pragma once

namespace fbx::core {

// Registers the logic-block behaviors (RS, OR2, AND2, NOT, E_CYCLE, IX,
// QX). Idempotent; invoked automatically by ResourceRuntime.
void ensure_builtin_behaviors();

}  // namespace fbx::core
