"""Suite manifests shipped with wllab"""
