// Copyright 2026 The snf-surrogate Authors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(snf_surrogate::cli::dispatch(std::env::args_os()));
}
