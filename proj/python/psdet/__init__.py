# psdet/python/psdet/__init__.py
#
# Copyright 2026  psdet authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABLITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.
"""Python access to the psdet partial-spoof detection library."""

from psdet._psdet import (
    LFB_DIM,
    MFCC_DIM,
    SAMPLE_RATE,
    PsdetError,
    compute_eer,
    compute_lfb,
    compute_mfcc,
    evaluate_dump,
    gmm_frame_llr,
    interleaved_aware,
    linear_filterbank,
    mix_at_snr,
    moving_average,
    oc_softmax_loss,
    plda_llr,
    read_feature_archive,
    read_wav,
    score_average,
    write_wav,
)

__all__ = [
    "LFB_DIM",
    "MFCC_DIM",
    "SAMPLE_RATE",
    "PsdetError",
    "compute_eer",
    "compute_lfb",
    "compute_mfcc",
    "evaluate_dump",
    "gmm_frame_llr",
    "interleaved_aware",
    "linear_filterbank",
    "mix_at_snr",
    "moving_average",
    "oc_softmax_loss",
    "plda_llr",
    "read_feature_archive",
    "read_wav",
    "score_average",
    "write_wav",
]
