"""Base support for flamelab unit tests."""

import re
import shutil
import tempfile
import unittest

import numpy as np
from kgb import SpyAgency

from flamelab.mollifier import BetaProfile


class TestCase(unittest.TestCase):
    """Base class for test cases for flamelab."""

    ws_re = re.compile(r'\s+')

    def setUp(self):
        self.agency = SpyAgency()
        self._tempdirs = []

    def tearDown(self):
        self.agency.unspy_all()

        for path in self._tempdirs:
            shutil.rmtree(path, ignore_errors=True)

    def shortDescription(self):
        """Return the description of the current test.

        This changes the default behavior to replace all newlines with spaces,
        allowing a test description to span lines. It should still be kept
        short, though.

        Returns:
            str:
            The description of the test.
        """
        doc = self._testMethodDoc

        if doc is not None:
            doc = doc.split('\n\n', 1)[0]
            doc = self.ws_re.sub(' ', doc).strip()

        return doc

    def make_tempdir(self):
        """Return a scratch directory removed when the test finishes.

        Returns:
            str:
            The directory path.
        """
        path = tempfile.mkdtemp(prefix='flamelab-tests.')
        self._tempdirs.append(path)

        return path

    def make_profile(self):
        """Return the polynomial bump 6t(1 - t), which has mass 1.

        Returns:
            flamelab.mollifier.BetaProfile:
            The profile.
        """
        return BetaProfile(BetaProfile.KIND_POLYNOMIAL_BUMP)

    def assertAllClose(self, actual, expected, rtol=1e-7, atol=0.0):
        """Assert that two arrays agree elementwise.

        Args:
            actual (array-like):
                The computed values.

            expected (array-like):
                The expected values.

            rtol (float, optional):
                The relative tolerance.

            atol (float, optional):
                The absolute tolerance.

        Raises:
            AssertionError:
                The arrays differ.
        """
        np.testing.assert_allclose(actual, expected, rtol=rtol, atol=atol)
