from .sidecar import (AnnotationBackend, ModelLoadError, RawDetection,
                      RtDetrBackend, SidecarConfig, detect_dir)

__version__ = "0.1.0"

__all__ = ["AnnotationBackend", "ModelLoadError", "RawDetection",
           "RtDetrBackend", "SidecarConfig", "detect_dir", "__version__"]
