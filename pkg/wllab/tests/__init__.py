"""Package: wllab.tests"""