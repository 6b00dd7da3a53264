# setup.py

from setuptools import setup, find_packages

setup(
    name='edgecodec',
    version='1.0.0',
    description='Edge-adaptive block-DCT color image codec with a rate/quality bench',
    author='Shai Nisan',
    author_email='your.email@example.com',
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=[
        'numpy',
        'scipy',
        'rich',
    ],
    entry_points={
        'console_scripts': [
            'edgecodec=edgecodec.main:main',
        ],
    },
    python_requires='>=3.10',
)
