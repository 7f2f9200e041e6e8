"""Speaker-verification toolkit: cepstral features, SVM/LR banks, voting
fusion, multiband denoising, and a batch evaluation protocol."""

from ._core import BACKEND as SMO_BACKEND
from .audio_io import AudioBuffer, SnrSpec, load_wav, mix_noise_at_snr, rms, save_wav
from .classify import (CvGrid, Kernel, LabeledSet, LrModel, SvmModel,
                       cv_select, kernel_eval, kernel_matrix, lr_predict,
                       lr_train, svm_decide, svm_train)
from .dsp import FrameConfig, Spectrogram, analyze, hann_periodic
from .enhance import (BandLayout, NoiseProfile, estimate_noise,
                      make_band_layout, multiband_subtract,
                      overlap_add_reconstruct, subtract_power)
from .ensemble import (BankMember, ClassifierBank, VotingRule, bank_decide,
                       ensemble_roc, vote)
from .errors import VeriphonError
from .evaluate import (Condition, ConfusionCounts, EvalReport, RocCurve,
                       SystemConfig, confusion_counts, make_system,
                       parse_condition, roc_auc, run_protocol, timing_probe,
                       tpr_fpr, train_systems)
from .features import (FeatureMatrix, FeatureRecipe, Normalizer,
                       UtteranceVector, aggregate_utterance, apply_normalizer,
                       bfcc, combine, deltas, fit_normalizer, mfcc, plp,
                       rasta_filter, rasta_plp)
from .filterbank import (TriangularFilterbank, WarpScale, apply_filterbank,
                         build_filterbank, bark_to_hz, hz_to_bark, hz_to_mel,
                         mel_to_hz)
from .manifest import CorpusManifest, ExperimentConfig, SpeakerEntry, load_manifest
from .synth import make_colored_noise, make_utterance, synth_corpus

__version__ = "0.1.0"
