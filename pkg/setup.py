from setuptools import setup, find_namespace_packages

setup(
    name="nuca_lab",
    version="1.0.0",
    packages=find_namespace_packages(include=['nuca_lab', 'nuca_lab.*']),
    install_requires=[
        'numpy',
        'opencv-python',
        'psutil',
    ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    entry_points={
        'console_scripts': ['nuca=nuca_lab.cli:main'],
    },
    python_requires='>=3.8',
)
